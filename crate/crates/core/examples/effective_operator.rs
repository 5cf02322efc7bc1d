// SPDX-License-Identifier: Apache-2.0

//! How filtering reweights intra- and inter-group aggregation.
//!
//!     cargo run --example effective_operator

use fairfilt::apply::effective_operator;
use fairfilt::data::{generate_sbm, SbmSpec};
use fairfilt::design::{design_direct, DesignConfig, FilterSpec};
use fairfilt::graph::normalized_operators;
use fairfilt::metrics::BiasContext;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let data = generate_sbm(&SbmSpec {
        sizes: [80, 80],
        ..SbmSpec::default()
    })?;
    let spec = decompose(&normalized_operators(&data.graph))?;
    let s = data.signals.s_signal();
    let ctx = BiasContext::new(&spec, &s)?;

    let before = effective_operator(&spec, &FilterSpec::all_pass(ctx.n()), &s)?;
    println!(
        "all-pass   intra {:9.3}  inter {:9.3}",
        before.intra_weight, before.inter_weight
    );
    for tau in [0.99, 0.9, 0.5] {
        let after = effective_operator(
            &spec,
            &design_direct(&ctx, &DesignConfig::with_tau(tau))?,
            &s,
        )?;
        println!(
            "tau {tau:<5}  intra {:9.3}  inter {:9.3}  gap {:9.3}",
            after.intra_weight,
            after.inter_weight,
            after.gap()
        );
    }
    Ok(())
}
