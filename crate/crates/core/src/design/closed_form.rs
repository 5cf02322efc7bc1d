// SPDX-License-Identifier: Apache-2.0

//! Closed-form minimizer of the linear bound `mᵀh̃`.
//!
//! Frequencies are visited in descending order of `m` and each one absorbs
//! as much of the filtering budget `B = n(1-τ)` as it can, so the budget is
//! spent where the bound coefficient is largest.

use crate::error::Result;
use crate::metrics::BiasContext;

use super::{DesignConfig, FilterSpec};

pub fn design_closed_form(ctx: &BiasContext, cfg: &DesignConfig) -> Result<FilterSpec> {
    cfg.validate()?;
    let m = ctx.m();
    let n = m.len();
    let budget = n as f64 * (1.0 - cfg.tau);

    // Stable: ties keep ascending original index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[b].total_cmp(&m[a]));

    let mut h = vec![0.0; n];
    let mut spent = 0.0;
    for &i in &order {
        let remaining = (budget - spent).max(0.0);
        let hi = (1.0 - remaining).max(0.0);
        h[i] = hi;
        spent += 1.0 - hi;
    }
    Ok(FilterSpec::from_response(h, cfg.tau))
}
