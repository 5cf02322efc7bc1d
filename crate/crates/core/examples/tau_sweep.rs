// SPDX-License-Identifier: Apache-2.0

//! Sensitivity of fairness and accuracy to the budget `τ`, averaged over
//! split seeds.
//!
//!     cargo run --release --example tau_sweep

use fairfilt::cli::{sweep, Experiment, Learner, LearnerOptions};
use fairfilt::data::{generate_sbm, SbmSpec};
use fairfilt::design::{DesignConfig, Method};
use fairfilt::graph::normalized_operators;
use fairfilt::learners::Placement;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let dataset = generate_sbm(&SbmSpec::default())?;
    let ops = normalized_operators(&dataset.graph);
    let spec = decompose(&ops)?;
    let exp = Experiment {
        dataset: &dataset,
        ops: &ops,
        spec: &spec,
    };
    let opts = LearnerOptions {
        placement: Placement::Pre1,
        ..LearnerOptions::new(Learner::Gcn)
    };
    let taus = [0.5, 0.7, 0.8, 0.9];
    let rows = sweep(
        exp,
        Method::Direct,
        &DesignConfig::default(),
        &taus,
        &[],
        &opts,
        &[0, 1],
    )?;

    let base = &rows[0].summary.without;
    println!(
        "no filter   acc {:5.2}  dSP {:5.2}  dEO {:5.2}",
        100.0 * base.accuracy.mean,
        100.0 * base.delta_sp.mean,
        100.0 * base.delta_eo.mean
    );
    for row in &rows {
        let m = &row.summary.with;
        println!(
            "tau {:<6}  acc {:5.2}  dSP {:5.2}  dEO {:5.2}  rho {:.3}",
            row.value,
            100.0 * m.accuracy.mean,
            100.0 * m.delta_sp.mean,
            100.0 * m.delta_eo.mean,
            row.rho
        );
    }
    Ok(())
}
