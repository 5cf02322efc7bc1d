// SPDX-License-Identifier: Apache-2.0

//! A polynomial filter applied without an eigendecomposition: Horner's rule
//! on `Â` gives the same result as the spectral route.
//!
//!     cargo run --example polynomial_filter

use fairfilt::apply::{apply_frequency, apply_vertex};
use fairfilt::data::{generate_sbm, SbmSpec};
use fairfilt::design::{design_polynomial, Basis, DesignConfig};
use fairfilt::graph::normalized_operators;
use fairfilt::metrics::BiasContext;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let data = generate_sbm(&SbmSpec {
        sizes: [40, 40],
        ..SbmSpec::default()
    })?;
    let ops = normalized_operators(&data.graph);
    let spec = decompose(&ops)?;
    let ctx = BiasContext::new(&spec, &data.signals.s_signal())?;

    for basis in [Basis::Monomial, Basis::Chebyshev] {
        for order in [2, 4, 8] {
            let cfg = DesignConfig {
                tau: 0.8,
                order,
                basis,
                ..DesignConfig::default()
            };
            let filt = design_polynomial(&ctx, &spec, &cfg)?;
            let rho = fairfilt::metrics::rho_separable(&ctx, &filt.response())?;
            let x = &data.signals.features;
            let gap = (apply_vertex(&ops, &filt, x)? - apply_frequency(&spec, &filt, x)?).amax();
            println!("{basis:?} L={order}: rho {rho:.4}, vertex vs spectral max diff {gap:.1e}");
        }
    }
    Ok(())
}
