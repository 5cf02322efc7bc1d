// SPDX-License-Identifier: Apache-2.0

//! Polynomial filter design: minimize `ρ(Ψh)` over `L` coefficients.
//!
//! The problem is a convex quadratic program in `h`. It is solved by
//! accelerated projected gradient, with each projection onto
//! `{h : 0 ≤ Ψh ≤ 1, Σ Ψh ≥ nτ}` computed by Dykstra's alternating
//! projections over the `2n + 1` halfspaces.
//!
//! Iterates live in the coordinates of an orthonormal basis `U` of
//! `range(Ψ)` (from the thin SVD `Ψ = U Σ Wᵀ`), so the gradient Lipschitz
//! constant is `2 max cᵢ` regardless of how badly conditioned the monomial
//! Vandermonde matrix is. Coefficients are recovered as `h = W Σ⁻¹ g`.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::metrics::BiasContext;
use crate::spectral::SpectralDecomposition;

use super::{Basis, DesignConfig, FilterKind, FilterSpec};

const DYKSTRA_MAX_SWEEPS: usize = 500;
const DYKSTRA_TOLERANCE: f64 = 1e-14;
/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-12;
/// Largest constraint violation accepted on the returned response.
pub const MAX_VIOLATION: f64 = 1e-6;

/// `n × L` matrix with `Ψᵢⱼ = pⱼ(1 - λᵢ)` for the chosen polynomial family.
pub fn basis_matrix(lambda: &DVector<f64>, order: usize, basis: Basis) -> DMatrix<f64> {
    let n = lambda.len();
    let mut psi = DMatrix::zeros(n, order);
    for (i, &l) in lambda.iter().enumerate() {
        let x = 1.0 - l;
        let mut prev = 1.0;
        let mut cur = x;
        for j in 0..order {
            psi[(i, j)] = match (basis, j) {
                (_, 0) => 1.0,
                (Basis::Monomial, _) => psi[(i, j - 1)] * x,
                (Basis::Chebyshev, 1) => x,
                (Basis::Chebyshev, _) => {
                    let next = 2.0 * x * cur - prev;
                    prev = cur;
                    cur = next;
                    next
                }
            };
        }
    }
    psi
}

/// Monomial coefficients of `Σ cⱼ Tⱼ(x)`.
pub(crate) fn chebyshev_to_monomial(coeffs: &[f64]) -> Vec<f64> {
    let order = coeffs.len();
    let mut out = vec![0.0; order];
    // Monomial expansions of T_{k-1} and T_k.
    let mut prev: Vec<f64> = vec![1.0];
    let mut cur: Vec<f64> = vec![0.0, 1.0];
    for (k, &ck) in coeffs.iter().enumerate() {
        let poly: &[f64] = match k {
            0 => &prev,
            1 => &cur,
            _ => {
                let mut next = vec![0.0; k + 1];
                for (d, &a) in cur.iter().enumerate() {
                    next[d + 1] += 2.0 * a;
                }
                for (d, &a) in prev.iter().enumerate() {
                    next[d] -= a;
                }
                prev = std::mem::replace(&mut cur, next);
                &cur
            }
        };
        for (d, &a) in poly.iter().enumerate() {
            out[d] += ck * a;
        }
    }
    out
}

/// Constraint set `{g : 0 ≤ Ug ≤ 1, 1ᵀUg ≥ nτ}` in orthonormal coordinates.
struct Constraints {
    rows: Vec<f64>,
    row_norms: Vec<f64>,
    sum_row: Vec<f64>,
    sum_norm: f64,
    target: f64,
    n: usize,
    r: usize,
}

impl Constraints {
    fn new(u: &DMatrix<f64>, target: f64) -> Self {
        let (n, r) = u.shape();
        let mut rows = Vec::with_capacity(n * r);
        for i in 0..n {
            rows.extend(u.row(i).iter());
        }
        let row_norms = (0..n)
            .map(|i| rows[i * r..(i + 1) * r].iter().map(|x| x * x).sum())
            .collect();
        let sum_row: Vec<f64> = (0..r).map(|j| u.column(j).sum()).collect();
        let sum_norm = sum_row.iter().map(|x| x * x).sum();
        Self {
            rows,
            row_norms,
            sum_row,
            sum_norm,
            target,
            n,
            r,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.r..(i + 1) * self.r]
    }

    /// Dykstra's method over the `2n + 1` halfspaces. Every correction term
    /// is a nonnegative multiple of its halfspace normal, so only the
    /// multipliers are stored.
    fn project(&self, start: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut x = start.to_vec();
        let mut lower = vec![0.0; self.n];
        let mut upper = vec![0.0; self.n];
        let mut budget = 0.0;

        // Halfspace {a·x ≤ b} with stored multiplier beta.
        fn step(x: &mut [f64], a: &[f64], norm2: f64, b: f64, beta: &mut f64) {
            if norm2 == 0.0 {
                return;
            }
            let ax: f64 = a.iter().zip(x.iter()).map(|(ai, xi)| ai * xi).sum();
            let violation = ax + *beta * norm2 - b;
            let next = violation.max(0.0) / norm2;
            let shift = *beta - next;
            if shift != 0.0 {
                for (xi, ai) in x.iter_mut().zip(a) {
                    *xi += shift * ai;
                }
            }
            *beta = next;
        }

        let mut neg = vec![0.0; r];
        for _ in 0..DYKSTRA_MAX_SWEEPS {
            let before = x.clone();
            for i in 0..self.n {
                let a = self.row(i);
                for (ni, ai) in neg.iter_mut().zip(a) {
                    *ni = -ai;
                }
                step(&mut x, &neg, self.row_norms[i], 0.0, &mut lower[i]);
                step(&mut x, a, self.row_norms[i], 1.0, &mut upper[i]);
            }
            for (ni, ai) in neg.iter_mut().zip(&self.sum_row) {
                *ni = -ai;
            }
            step(&mut x, &neg, self.sum_norm, -self.target, &mut budget);

            let moved: f64 = x
                .iter()
                .zip(&before)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if moved <= DYKSTRA_TOLERANCE * scale {
                break;
            }
        }
        x
    }
}

fn violation(h_tilde: &DVector<f64>, target: f64) -> f64 {
    let low = (-h_tilde.min()).max(0.0);
    let high = (h_tilde.max() - 1.0).max(0.0);
    let budget = (target - h_tilde.sum()).max(0.0);
    low.max(high).max(budget)
}

pub fn design_polynomial(
    ctx: &BiasContext,
    spec: &SpectralDecomposition,
    cfg: &DesignConfig,
) -> Result<FilterSpec> {
    cfg.validate()?;
    check_len("bias context", spec.n(), ctx.n())?;
    let n = spec.n();
    let order = cfg.order;
    let target = n as f64 * cfg.tau;
    let psi = basis_matrix(spec.eigenvalues(), order, cfg.basis);

    let svd = psi.clone().svd(true, true);
    let (u_full, w_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("svd requested with both factors"),
    };
    let sigma_max = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > RANK_TOLERANCE * sigma_max)
        .collect();
    let r = keep.len();
    let u = u_full.select_columns(&keep);

    let c = ctx.curvature();
    let objective = |g: &DVector<f64>| -> f64 {
        let resp = &u * g;
        resp.iter().zip(c.iter()).map(|(x, ci)| ci * x * x).sum()
    };
    let gradient = |g: &DVector<f64>| -> DVector<f64> {
        let resp = &u * g;
        let weighted = resp.zip_map(&c, |x, ci| 2.0 * ci * x);
        u.tr_mul(&weighted)
    };

    let constraints = Constraints::new(&u, target);
    let project = |z: &DVector<f64>| DVector::from_vec(constraints.project(z.as_slice()));

    // All-pass lies in range(Ψ) through the constant column.
    let mut g = project(&u.tr_mul(&DVector::from_element(n, 1.0)));
    let mut best = g.clone();
    let mut best_value = objective(&g);

    let curvature_max = c.max();
    if curvature_max > 0.0 {
        let step = 1.0 / (2.0 * curvature_max);
        let mut y = g.clone();
        let mut t: f64 = 1.0;
        for _ in 0..cfg.max_iterations {
            let next = project(&(&y - gradient(&y) * step));
            let value = objective(&next);
            if value < best_value {
                best_value = value;
                best = next.clone();
            }
            let moved = (&next - &g).norm();
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            // gradient-based restart keeps the accelerated iterates monotone in
            // practice
            if (&y - &next).dot(&(&next - &g)) > 0.0 {
                t = 1.0;
                y = next.clone();
            } else {
                y = &next + (&next - &g) * ((t - 1.0) / t_next);
                t = t_next;
            }
            g = next;
            if moved < cfg.tolerance * (1.0 + g.norm()) {
                break;
            }
        }
    }

    // h = W Σ⁻¹ g restricted to the kept singular directions.
    let mut coeffs = DVector::zeros(order);
    for (slot, &k) in keep.iter().enumerate() {
        let scale = best[slot] / svd.singular_values[k];
        coeffs += w_t.row(k).transpose() * scale;
    }
    let h_tilde = &psi * &coeffs;
    let worst = violation(&h_tilde, target);
    if worst > MAX_VIOLATION {
        return Err(Error::ConvergenceFailure {
            routine: "polynomial filter design",
            iterations: cfg.max_iterations,
            residual: worst,
            last_iterate: Some(h_tilde.as_slice().to_vec()),
        });
    }
    debug_assert_eq!(r, u.ncols());

    Ok(FilterSpec {
        kind: FilterKind::Polynomial,
        tau: cfg.tau,
        order: Some(order),
        basis: Some(cfg.basis),
        h_tilde: h_tilde.as_slice().to_vec(),
        coeffs: Some(coeffs.as_slice().to_vec()),
    })
}
