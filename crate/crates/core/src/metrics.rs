// SPDX-License-Identifier: Apache-2.0

//! Bias and fairness measures.
//!
//! The bias measure `ρ(h̃) = ‖sᵀ V (I-Λ) diag(h̃) Vᵀ‖₂` is the 2-norm of the
//! correlation between the sensitive attribute and the effective aggregation
//! operator. Because `Vᵀ` is orthonormal it drops out of the norm, so
//! `ρ = ‖s̃ ⊙ (1-λ) ⊙ h̃‖₂`. [`rho_dense`] evaluates the definition with
//! explicit matrix products and is the reference for [`rho_separable`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::error::{check_len, Error, Result};
use crate::spectral::{check_binary, gft, SpectralDecomposition};

/// Slack allowed on the `[0, 1]` box for frequency responses coming out of
/// an iterative solver.
pub const RESPONSE_BOX_TOLERANCE: f64 = 1e-6;

/// Spectral quantities shared by every design for one `(graph, s)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasContext {
    s_tilde: DVector<f64>,
    lambda: DVector<f64>,
    m: DVector<f64>,
}

impl BiasContext {
    pub fn new(spec: &SpectralDecomposition, s: &DVector<f64>) -> Result<Self> {
        check_len("sensitive signal", spec.n(), s.len())?;
        check_binary("s", s)?;
        let s_tilde = gft(spec, s)?;
        Self::from_parts(s_tilde, spec.eigenvalues().clone())
    }

    /// Builds a context from an already transformed sensitive signal.
    pub fn from_parts(s_tilde: DVector<f64>, lambda: DVector<f64>) -> Result<Self> {
        check_len("eigenvalues", s_tilde.len(), lambda.len())?;
        let m = s_tilde.zip_map(&lambda, |s, l| s.abs() * (1.0 - l).abs());
        Ok(Self { s_tilde, lambda, m })
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn s_tilde(&self) -> &DVector<f64> {
        &self.s_tilde
    }

    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    /// `mᵢ = |s̃ᵢ| |1-λᵢ|`.
    pub fn m(&self) -> &DVector<f64> {
        &self.m
    }

    /// `cᵢ = mᵢ²`, the curvature of `ρ²` along frequency `i`.
    pub fn curvature(&self) -> DVector<f64> {
        self.m.map(|x| x * x)
    }
}

pub(crate) fn check_response(n: usize, h_tilde: &DVector<f64>) -> Result<()> {
    check_len("frequency response", n, h_tilde.len())?;
    match h_tilde
        .iter()
        .position(|&h| !(-RESPONSE_BOX_TOLERANCE..=1.0 + RESPONSE_BOX_TOLERANCE).contains(&h))
    {
        None => Ok(()),
        Some(i) => Err(Error::Domain(format!(
            "frequency response entry {i} = {} outside [0, 1]",
            h_tilde[i]
        ))),
    }
}

/// `ρ` from its definition: forms the effective operator densely and takes
/// the norm of `sᵀĀ`.
pub fn rho_dense(
    spec: &SpectralDecomposition,
    s: &DVector<f64>,
    h_tilde: &DVector<f64>,
) -> Result<f64> {
    check_len("sensitive signal", spec.n(), s.len())?;
    check_binary("s", s)?;
    check_response(spec.n(), h_tilde)?;
    let weights: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .zip(h_tilde.iter())
        .map(|(l, h)| (1.0 - l) * h)
        .collect();
    let effective = spec.spectral_matrix(&weights);
    Ok((s.transpose() * effective).norm())
}

/// `ρ = sqrt(Σ (s̃ᵢ (1-λᵢ) h̃ᵢ)²)`.
pub fn rho_separable(ctx: &BiasContext, h_tilde: &DVector<f64>) -> Result<f64> {
    check_response(ctx.n(), h_tilde)?;
    Ok(ctx
        .m
        .iter()
        .zip(h_tilde.iter())
        .map(|(m, h)| (m * h) * (m * h))
        .sum::<f64>()
        .sqrt())
}

/// Upper bound `√n Σ mᵢ |h̃ᵢ| ≥ ρ`.
pub fn rho_upper_bound(ctx: &BiasContext, h_tilde: &DVector<f64>) -> Result<f64> {
    check_response(ctx.n(), h_tilde)?;
    let sum: f64 = ctx
        .m
        .iter()
        .zip(h_tilde.iter())
        .map(|(m, h)| m * h.abs())
        .sum();
    Ok((ctx.n() as f64).sqrt() * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, DeriveSerialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    /// `‖sᵀR‖₁`.
    Inner,
    /// Sum of absolute Pearson coefficients between `s` and each column.
    #[default]
    Pearson,
}

/// Total correlation between the sensitive attribute and every column of a
/// representation matrix.
pub fn total_correlation(
    s: &DVector<f64>,
    reps: &DMatrix<f64>,
    mode: CorrelationMode,
) -> Result<f64> {
    check_len("representation rows", s.len(), reps.nrows())?;
    let n = s.len() as f64;
    match mode {
        CorrelationMode::Inner => Ok(reps.column_iter().map(|col| s.dot(&col).abs()).sum()),
        CorrelationMode::Pearson => {
            let s_mean = s.mean();
            let s_centered = s.add_scalar(-s_mean);
            let s_norm = s_centered.norm();
            if s_norm == 0.0 || n == 0.0 {
                return Ok(0.0);
            }
            let mut total = 0.0;
            for col in reps.column_iter() {
                let centered = col.add_scalar(-col.mean());
                let norm = centered.norm();
                // zero-variance column carries no correlation
                if norm > 0.0 {
                    total += (s_centered.dot(&centered) / (s_norm * norm)).abs();
                }
            }
            Ok(total)
        }
    }
}

/// Counts of `(s, ŷ)` and `(s, y, ŷ)` cells. Index 0 is the `-1` value and
/// index 1 the `+1` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cells {
    pub group_prediction: [[usize; 2]; 2],
    pub group_label_prediction: [[[usize; 2]; 2]; 2],
}

fn slot(x: i8) -> usize {
    usize::from(x > 0)
}

fn label(i: usize) -> i8 {
    if i == 0 {
        -1
    } else {
        1
    }
}

fn rate(positive: usize, total: usize, cell: &str) -> Result<f64> {
    if total == 0 {
        Err(Error::EmptyGroup(cell.to_string()))
    } else {
        Ok(positive as f64 / total as f64)
    }
}

impl Cells {
    /// `|P(ŷ=1|s=-1) - P(ŷ=1|s=1)|` from the stored counts.
    pub fn delta_sp(&self) -> Result<f64> {
        let [neg, pos] = self.group_prediction;
        let r_neg = rate(neg[1], neg[0] + neg[1], "s=-1")?;
        let r_pos = rate(pos[1], pos[0] + pos[1], "s=1")?;
        Ok((r_neg - r_pos).abs())
    }

    /// `|P(ŷ=1|y=1,s=-1) - P(ŷ=1|y=1,s=1)|` from the stored counts.
    pub fn delta_eo(&self) -> Result<f64> {
        let neg = self.group_label_prediction[0][1];
        let pos = self.group_label_prediction[1][1];
        let r_neg = rate(neg[1], neg[0] + neg[1], "s=-1,y=1")?;
        let r_pos = rate(pos[1], pos[0] + pos[1], "s=1,y=1")?;
        Ok((r_neg - r_pos).abs())
    }

    pub fn total(&self) -> usize {
        self.group_prediction.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        let mut correct = 0;
        for groups in &self.group_label_prediction {
            for (y, preds) in groups.iter().enumerate() {
                correct += preds[y];
            }
        }
        correct
    }

    pub fn to_map(&self) -> BTreeMap<String, usize> {
        let mut map = BTreeMap::new();
        for s in 0..2 {
            for p in 0..2 {
                map.insert(
                    format!("s={},y_hat={}", label(s), label(p)),
                    self.group_prediction[s][p],
                );
                for y in 0..2 {
                    map.insert(
                        format!("s={},y={},y_hat={}", label(s), label(y), label(p)),
                        self.group_label_prediction[s][y][p],
                    );
                }
            }
        }
        map
    }
}

impl Serialize for Cells {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map = self.to_map();
        let mut out = serializer.serialize_map(Some(map.len()))?;
        for (k, v) in &map {
            out.serialize_entry(k, v)?;
        }
        out.end()
    }
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub delta_sp: f64,
    pub delta_eo: f64,
    pub cells: Cells,
}

fn check_signs(what: &str, values: &[i8]) -> Result<()> {
    match values.iter().position(|&v| v != 1 && v != -1) {
        None => Ok(()),
        Some(i) => Err(Error::Domain(format!(
            "{what}[{i}] = {} is not in {{-1, 1}}",
            values[i]
        ))),
    }
}

/// Accuracy, statistical parity gap and equal opportunity gap from empirical
/// frequencies.
pub fn group_fairness(y_hat: &[i8], y: &[i8], s: &[i8]) -> Result<EvalReport> {
    check_len("labels", y_hat.len(), y.len())?;
    check_len("sensitive attribute", y_hat.len(), s.len())?;
    check_signs("y_hat", y_hat)?;
    check_signs("y", y)?;
    check_signs("s", s)?;

    let mut cells = Cells::default();
    for ((&p, &l), &g) in y_hat.iter().zip(y).zip(s) {
        cells.group_prediction[slot(g)][slot(p)] += 1;
        cells.group_label_prediction[slot(g)][slot(l)][slot(p)] += 1;
    }
    let delta_sp = cells.delta_sp()?;
    let delta_eo = cells.delta_eo()?;
    let accuracy = cells.correct() as f64 / cells.total() as f64;
    Ok(EvalReport {
        accuracy,
        delta_sp,
        delta_eo,
        cells,
    })
}
