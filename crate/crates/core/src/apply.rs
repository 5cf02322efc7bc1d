// SPDX-License-Identifier: Apache-2.0

//! Applying filters to graph signals, and the effective aggregation operator
//! `Ā = V (I-Λ) diag(h̃) Vᵀ` that results from filtering before aggregation.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::design::{Basis, FilterKind, FilterSpec};
use crate::error::{check_len, Error, Result};
use crate::graph::NormalizedOperators;
use crate::spectral::{check_binary, SpectralDecomposition};

/// `V diag(h̃) Vᵀ` applied to every column of `signals`.
///
/// An all-pass response returns the input unchanged.
pub fn apply_frequency(
    spec: &SpectralDecomposition,
    filt: &FilterSpec,
    signals: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    check_len("filter length", spec.n(), filt.n())?;
    check_len("signal rows", spec.n(), signals.nrows())?;
    if filt.is_all_pass() {
        return Ok(signals.clone());
    }
    let v = spec.eigenvectors();
    let mut spectrum = v.tr_mul(signals);
    for (mut row, &h) in spectrum.row_iter_mut().zip(&filt.h_tilde) {
        row *= h;
    }
    Ok(v * spectrum)
}

/// Dense `n × n` matrix of the filter, `V diag(h̃) Vᵀ`.
pub fn filter_matrix(spec: &SpectralDecomposition, filt: &FilterSpec) -> Result<DMatrix<f64>> {
    check_len("filter length", spec.n(), filt.n())?;
    if filt.is_all_pass() {
        return Ok(DMatrix::identity(spec.n(), spec.n()));
    }
    Ok(spec.spectral_matrix(&filt.h_tilde))
}

/// `Σ_l h_l Â^l · signals` by Horner's rule, never forming a power of `Â`.
pub fn apply_vertex_polynomial(
    ops: &NormalizedOperators,
    coeffs: &[f64],
    signals: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    check_len("signal rows", ops.n(), signals.nrows())?;
    let Some((&last, rest)) = coeffs.split_last() else {
        return Ok(DMatrix::zeros(signals.nrows(), signals.ncols()));
    };
    let a_hat = ops.a_hat();
    let mut acc = signals * last;
    for &h in rest.iter().rev() {
        acc = a_hat * acc;
        acc += signals * h;
    }
    Ok(acc)
}

/// `Σ_k c_k T_k(Â) · signals` by the three-term recurrence.
fn apply_vertex_chebyshev(
    ops: &NormalizedOperators,
    coeffs: &[f64],
    signals: &DMatrix<f64>,
) -> DMatrix<f64> {
    let a_hat = ops.a_hat();
    let mut out = DMatrix::zeros(signals.nrows(), signals.ncols());
    let mut prev = signals.clone();
    let mut cur = a_hat * signals;
    for (k, &c) in coeffs.iter().enumerate() {
        match k {
            0 => out += &prev * c,
            1 => out += &cur * c,
            _ => {
                let next = (a_hat * &cur) * 2.0 - &prev;
                prev = std::mem::replace(&mut cur, next);
                out += &cur * c;
            }
        }
    }
    out
}

/// Vertex-domain application of a polynomial filter in its own basis.
pub fn apply_vertex(
    ops: &NormalizedOperators,
    filt: &FilterSpec,
    signals: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let coeffs = match (filt.kind, &filt.coeffs) {
        (FilterKind::Polynomial, Some(c)) => c,
        _ => {
            return Err(Error::InvalidArgument(
                "vertex-domain application needs a polynomial filter".into(),
            ))
        }
    };
    check_len("signal rows", ops.n(), signals.nrows())?;
    match filt.basis.unwrap_or_default() {
        Basis::Monomial => apply_vertex_polynomial(ops, coeffs, signals),
        Basis::Chebyshev => Ok(apply_vertex_chebyshev(ops, coeffs, signals)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveOperator {
    pub matrix: DMatrix<f64>,
    /// `Σ |Āᵢⱼ|` over ordered pairs `i ≠ j` in the same sensitive group.
    pub intra_weight: f64,
    /// `Σ |Āᵢⱼ|` over ordered pairs in different groups.
    pub inter_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveSummary {
    pub intra_weight: f64,
    pub inter_weight: f64,
}

impl EffectiveOperator {
    pub fn summary(&self) -> EffectiveSummary {
        EffectiveSummary {
            intra_weight: self.intra_weight,
            inter_weight: self.inter_weight,
        }
    }

    pub fn gap(&self) -> f64 {
        (self.intra_weight - self.inter_weight).abs()
    }

    /// Full matrix as headerless CSV, one row per line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        for row in self.matrix.row_iter() {
            writer.write_record(row.iter().map(|x| x.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }
}

pub fn effective_operator(
    spec: &SpectralDecomposition,
    filt: &FilterSpec,
    s: &DVector<f64>,
) -> Result<EffectiveOperator> {
    check_len("filter length", spec.n(), filt.n())?;
    check_len("sensitive signal", spec.n(), s.len())?;
    check_binary("s", s)?;
    let weights: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .zip(&filt.h_tilde)
        .map(|(l, h)| (1.0 - l) * h)
        .collect();
    let matrix = spec.spectral_matrix(&weights);
    let n = spec.n();
    let mut intra_weight = 0.0;
    let mut inter_weight = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let w = matrix[(i, j)].abs();
            if s[i] == s[j] {
                intra_weight += w;
            } else {
                inter_weight += w;
            }
        }
    }
    Ok(EffectiveOperator {
        matrix,
        intra_weight,
        inter_weight,
    })
}
