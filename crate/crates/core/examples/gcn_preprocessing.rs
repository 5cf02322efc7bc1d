// SPDX-License-Identifier: Apache-2.0

//! Fair filter as a sublayer in front of a two-layer GCN.
//!
//!     cargo run --release --example gcn_preprocessing

use fairfilt::cli::report_on;
use fairfilt::data::{generate_sbm, split, SbmSpec};
use fairfilt::design::{design_direct, DesignConfig};
use fairfilt::graph::normalized_operators;
use fairfilt::learners::{train_gcn, GcnConfig, Placement};
use fairfilt::metrics::BiasContext;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let data = generate_sbm(&SbmSpec::default())?;
    let ops = normalized_operators(&data.graph);
    let spec = decompose(&ops)?;
    let ctx = BiasContext::new(&spec, &data.signals.s_signal())?;
    let filt = design_direct(&ctx, &DesignConfig::with_tau(0.8))?;
    let part = split(&data, [0.4, 0.3, 0.3], 0, true)?;
    let cfg = GcnConfig::default();

    for (name, f, placement) in [
        ("no filter", None, Placement::None),
        ("before layer 1", Some(&filt), Placement::Pre1),
        ("before layer 2", Some(&filt), Placement::Pre2),
        ("both layers", Some(&filt), Placement::Both),
    ] {
        let run = train_gcn(&ops, &spec, &data.signals, f, placement, &part, &cfg)?;
        let r = report_on(&data, &run.predictions, &part.test)?;
        println!(
            "{name:<15} acc {:5.2}%  dSP {:5.2}%  dEO {:5.2}%",
            100.0 * r.accuracy,
            100.0 * r.delta_sp,
            100.0 * r.delta_eo
        );
    }
    Ok(())
}
