// SPDX-License-Identifier: Apache-2.0

//! The three filter designs on one graph, side by side.
//!
//!     cargo run --example design_filters

use fairfilt::data::{generate_sbm, SbmSpec};
use fairfilt::design::{design, objective_report, DesignConfig, FilterSpec, Method};
use fairfilt::graph::normalized_operators;
use fairfilt::metrics::BiasContext;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let data = generate_sbm(&SbmSpec {
        sizes: [60, 60],
        ..SbmSpec::default()
    })?;
    let spec = decompose(&normalized_operators(&data.graph))?;
    let ctx = BiasContext::new(&spec, &data.signals.s_signal())?;

    let base = objective_report(&ctx, &FilterSpec::all_pass(ctx.n()))?;
    println!("all-pass   rho {:8.4}", base.rho);

    let cfg = DesignConfig {
        tau: 0.9,
        order: 8,
        ..DesignConfig::default()
    };
    for method in [Method::Direct, Method::Lp, Method::Poly] {
        let filt = design(method, &ctx, &spec, &cfg)?;
        let r = objective_report(&ctx, &filt)?;
        let zeroed = filt.h_tilde.iter().filter(|&&h| h < 1e-6).count();
        println!(
            "{:<10} rho {:8.4}  bound {:8.4}  slack {:7.4}  zeroed {zeroed}",
            format!("{method:?}"),
            r.rho,
            r.bound,
            r.budget_slack
        );
    }
    Ok(())
}
