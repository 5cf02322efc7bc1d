// SPDX-License-Identifier: Apache-2.0

//! Diffusion-style label propagation, `F ← α Â F + (1-α) Y₀`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::NormalizedOperators;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelPropConfig {
    pub alpha: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub threshold: f64,
    /// Reset labeled nodes to their seed value after every step.
    pub clamp_labeled: bool,
}

impl Default for LabelPropConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            max_iterations: 1000,
            tolerance: 1e-9,
            threshold: 0.0,
            clamp_labeled: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelPropOutcome {
    pub scores: Vec<f64>,
    pub iterations: usize,
}

/// `y_train[i]` is `+1`/`-1` for labeled nodes and `0` otherwise.
pub fn label_propagation(
    ops: &NormalizedOperators,
    y_train: &[i8],
    cfg: &LabelPropConfig,
) -> Result<LabelPropOutcome> {
    check_len("seed labels", ops.n(), y_train.len())?;
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::Domain(format!(
            "alpha = {} outside (0, 1)",
            cfg.alpha
        )));
    }
    if let Some(i) = y_train.iter().position(|y| !matches!(y, -1..=1)) {
        return Err(Error::Domain(format!(
            "seed label {} at node {i}",
            y_train[i]
        )));
    }
    for class in [-1, 1] {
        if !y_train.contains(&class) {
            return Err(Error::EmptyClass(class));
        }
    }

    let seeds = DVector::from_iterator(y_train.len(), y_train.iter().map(|&y| f64::from(y)));
    let restart = &seeds * (1.0 - cfg.alpha);
    let mut scores = seeds.clone();
    let mut residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        let mut next = ops.a_hat() * &scores * cfg.alpha + &restart;
        if cfg.clamp_labeled {
            for (f, &y) in next.iter_mut().zip(y_train) {
                if y != 0 {
                    *f = f64::from(y);
                }
            }
        }
        residual = (&next - &scores).amax();
        scores = next;
        if residual < cfg.tolerance {
            return Ok(LabelPropOutcome {
                scores: scores.as_slice().to_vec(),
                iterations: iteration,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        routine: "label propagation",
        iterations: cfg.max_iterations,
        residual,
        last_iterate: Some(scores.as_slice().to_vec()),
    })
}
