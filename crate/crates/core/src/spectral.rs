// SPDX-License-Identifier: Apache-2.0

//! Eigendecomposition of the normalized Laplacian and the graph Fourier
//! transform built on it.
//!
//! The eigensolver is a cyclic Jacobi iteration. It is slower than a
//! tridiagonal QR for large matrices but is unconditionally stable and gives
//! bitwise-reproducible output for a fixed input, which the rest of the crate
//! relies on.
//!
//! Eigenvector signs are fixed so that the entry of largest magnitude is
//! positive (ties go to the lowest index). Within a repeated eigenvalue no
//! particular basis is enforced.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::NormalizedOperators;

/// Stopping rule: off-diagonal Frobenius norm relative to the input norm.
pub const JACOBI_TOLERANCE: f64 = 1e-10;
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Column `i` pairs with `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.spectral_matrix(self.eigenvalues.as_slice())
    }

    /// `V diag(values) Vᵀ` for an arbitrary per-frequency weighting.
    pub fn spectral_matrix(&self, values: &[f64]) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (mut col, &w) in scaled.column_iter_mut().zip(values) {
            col *= w;
        }
        scaled * v.transpose()
    }
}

/// Eigendecomposition of the normalized Laplacian of `ops`.
pub fn decompose(ops: &NormalizedOperators) -> Result<SpectralDecomposition> {
    symmetric_eigen(ops.laplacian(), JACOBI_TOLERANCE, JACOBI_MAX_SWEEPS)
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// Output eigenvalues are sorted ascending and eigenvectors sign-normalized.
pub fn symmetric_eigen(
    matrix: &DMatrix<f64>,
    tolerance: f64,
    max_sweeps: usize,
) -> Result<SpectralDecomposition> {
    let n = matrix.nrows();
    check_len("square matrix columns", n, matrix.ncols())?;

    // Column-major working copies; columns p and q are contiguous.
    let mut a: Vec<f64> = matrix.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let idx = |row: usize, col: usize| col * n + row;

    let scale = matrix.norm();
    let threshold = tolerance * scale;
    let off_norm = |a: &[f64]| -> f64 {
        let mut sum = 0.0;
        for col in 0..n {
            for row in 0..n {
                if row != col {
                    sum += a[idx(row, col)] * a[idx(row, col)];
                }
            }
        }
        sum.sqrt()
    };

    let mut converged = n <= 1 || scale == 0.0;
    let mut residual = 0.0;
    let mut sweeps = 0;
    while !converged {
        residual = off_norm(&a);
        if residual <= threshold {
            converged = true;
            break;
        }
        if sweeps == max_sweeps {
            break;
        }
        sweeps += 1;

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[idx(p, q)] = 0.0;
                    a[idx(q, p)] = 0.0;
                    continue;
                }

                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // A <- A J on columns p, q.
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                // A <- Jᵀ A: by symmetry rows p, q mirror the updated columns
                // off the 2x2 block.
                for k in 0..n {
                    if k != p && k != q {
                        a[idx(p, k)] = a[idx(k, p)];
                        a[idx(q, k)] = a[idx(k, q)];
                    }
                }
                a[idx(p, p)] = app - t * apq;
                a[idx(q, q)] = aqq + t * apq;
                a[idx(p, q)] = 0.0;
                a[idx(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            routine: "jacobi eigensolver",
            iterations: sweeps,
            residual: residual / scale,
            last_iterate: None,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[idx(i, i)].total_cmp(&a[idx(j, j)]).then(i.cmp(&j)));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| a[idx(i, i)]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = &v[src * n..(src + 1) * n];
        let mut pivot = 0;
        for (k, x) in col.iter().enumerate() {
            if x.abs() > col[pivot].abs() {
                pivot = k;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (k, x) in col.iter().enumerate() {
            eigenvectors[(k, dst)] = sign * x;
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Graph Fourier transform `Vᵀ z`.
pub fn gft(spec: &SpectralDecomposition, z: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("signal", spec.n(), z.len())?;
    Ok(spec.eigenvectors.tr_mul(z))
}

/// Inverse transform `V z̃`.
pub fn igft(spec: &SpectralDecomposition, z_tilde: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("spectrum", spec.n(), z_tilde.len())?;
    Ok(&spec.eigenvectors * z_tilde)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub lambda: f64,
    pub abs_s_tilde: f64,
    pub abs_y_tilde: f64,
}

pub(crate) fn check_binary(what: &str, signal: &DVector<f64>) -> Result<()> {
    match signal.iter().position(|&x| x != 1.0 && x != -1.0) {
        None => Ok(()),
        Some(i) => Err(Error::Domain(format!(
            "{what}[{i}] = {} is not in {{-1, 1}}",
            signal[i]
        ))),
    }
}

/// Per-frequency magnitudes of the sensitive and label spectra, ordered by
/// ascending eigenvalue.
pub fn spectrum_table(
    spec: &SpectralDecomposition,
    s: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<Vec<SpectrumRow>> {
    check_len("sensitive signal", spec.n(), s.len())?;
    check_len("label signal", spec.n(), y.len())?;
    check_binary("s", s)?;
    check_binary("y", y)?;
    let s_tilde = gft(spec, s)?;
    let y_tilde = gft(spec, y)?;
    Ok((0..spec.n())
        .map(|i| SpectrumRow {
            index: i,
            lambda: spec.eigenvalues[i],
            abs_s_tilde: s_tilde[i].abs(),
            abs_y_tilde: y_tilde[i].abs(),
        })
        .collect())
}

/// CSV with header `index,lambda,abs_s_tilde,abs_y_tilde`.
pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["index", "lambda", "abs_s_tilde", "abs_y_tilde"])?;
    for row in rows {
        writer.write_record([
            row.index.to_string(),
            row.lambda.to_string(),
            row.abs_s_tilde.to_string(),
            row.abs_y_tilde.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
