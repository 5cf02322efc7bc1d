// SPDX-License-Identifier: Apache-2.0

//! Filtering the soft output of label propagation before thresholding.
//!
//!     cargo run --release --example label_prop_postprocessing

use fairfilt::cli::{report_on, seed_labels};
use fairfilt::data::{generate_sbm, split, SbmSpec};
use fairfilt::design::{design_closed_form, DesignConfig};
use fairfilt::graph::normalized_operators;
use fairfilt::learners::{
    label_propagation, postprocess_predictions, threshold_scores, LabelPropConfig,
};
use fairfilt::metrics::BiasContext;
use fairfilt::spectral::decompose;

fn main() -> fairfilt::Result<()> {
    let data = generate_sbm(&SbmSpec::default())?;
    let ops = normalized_operators(&data.graph);
    let spec = decompose(&ops)?;
    let ctx = BiasContext::new(&spec, &data.signals.s_signal())?;
    let part = split(&data, [0.4, 0.0, 0.6], 0, true)?;
    let lp = label_propagation(
        &ops,
        &seed_labels(&data, &part),
        &LabelPropConfig::default(),
    )?;

    let show = |name: &str, y_hat: &[i8]| -> fairfilt::Result<()> {
        let r = report_on(&data, y_hat, &part.test)?;
        println!(
            "{name:<14} acc {:6.2}%  dSP {:6.2}%  dEO {:6.2}%",
            100.0 * r.accuracy,
            100.0 * r.delta_sp,
            100.0 * r.delta_eo
        );
        Ok(())
    };
    show("raw", &threshold_scores(&lp.scores, 0.0))?;
    // The budget is tiny: removing a sliver of the group frequency already
    // flips the least confident nodes; a larger one erases the groups.
    for tau in [0.9990, 0.9988, 0.9986, 0.0] {
        let filt = design_closed_form(&ctx, &DesignConfig::with_tau(tau))?;
        show(
            &format!("tau = {tau}"),
            &postprocess_predictions(&spec, &filt, &lp.scores, 0.0)?,
        )?;
    }
    Ok(())
}
