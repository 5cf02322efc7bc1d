// SPDX-License-Identifier: Apache-2.0

//! Direct minimization of `ρ`.
//!
//! `ρ² = Σ cᵢ h̃ᵢ²` with `cᵢ = mᵢ²` is separable, so the KKT conditions give
//! a water-filling solution: frequencies with `cᵢ = 0` pass unchanged, the
//! rest follow `h̃ᵢ = min(1, μ / (2cᵢ))` with the multiplier `μ` set by the
//! active budget constraint `Σ h̃ = nτ`.

use crate::error::Result;
use crate::metrics::BiasContext;

use super::{DesignConfig, FilterSpec};

const BISECTION_STEPS: usize = 400;

pub fn design_direct(ctx: &BiasContext, cfg: &DesignConfig) -> Result<FilterSpec> {
    cfg.validate()?;
    let c = ctx.curvature();
    let n = c.len();
    let target = n as f64 * cfg.tau;

    let mut h = vec![0.0; n];
    let mut free_budget = 0.0;
    for (hi, &ci) in h.iter_mut().zip(c.iter()) {
        if ci == 0.0 {
            *hi = 1.0;
            free_budget += 1.0;
        }
    }
    let need = target - free_budget;
    if need <= 0.0 {
        return Ok(FilterSpec::from_response(h, cfg.tau));
    }

    let response = |mu: f64, i: usize| -> f64 {
        let ci = c[i];
        if ci == 0.0 {
            1.0
        } else {
            (mu / (2.0 * ci)).min(1.0)
        }
    };
    let passed = |mu: f64| -> f64 {
        (0..n)
            .filter(|&i| c[i] > 0.0)
            .map(|i| response(mu, i))
            .sum()
    };

    // At mu = 2 max c every entry saturates at 1, so the bracket is feasible.
    let mut lo = 0.0;
    let mut hi = 2.0 * c.max();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if passed(mid) >= need {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for (i, hi_entry) in h.iter_mut().enumerate() {
        *hi_entry = response(hi, i);
    }
    Ok(FilterSpec::from_response(h, cfg.tau))
}
