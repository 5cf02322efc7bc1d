// SPDX-License-Identifier: Apache-2.0

//! Shared generators and independent oracles for the integration tests.

#![allow(dead_code)]

use fairfilt::graph::{build_graph, Graph};
use fairfilt::spectral::SpectralDecomposition;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn connected(edges: Vec<(usize, usize)>, n: usize) -> Option<Graph> {
    build_graph(&edges, n).ok().filter(Graph::is_connected)
}

/// Erdős–Rényi graph conditioned on connectivity.
pub fn erdos_renyi(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        if let Some(g) = connected(edges, n) {
            return g;
        }
    }
}

/// Two-group block model; returns the graph and the group signal.
pub fn block_model(
    rng: &mut ChaCha8Rng,
    sizes: [usize; 2],
    p_in: f64,
    p_out: f64,
) -> (Graph, DVector<f64>) {
    let n = sizes[0] + sizes[1];
    let s = DVector::from_fn(n, |i, _| if i < sizes[0] { -1.0 } else { 1.0 });
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = if s[i] == s[j] { p_in } else { p_out };
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        if let Some(g) = connected(edges, n) {
            return (g, s.clone());
        }
    }
}

/// Random `±1` signal with both values present.
pub fn random_groups(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let s = DVector::from_fn(n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
        if s.iter().any(|&x| x > 0.0) && s.iter().any(|&x| x < 0.0) {
            return s;
        }
    }
}

pub fn random_response(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random::<f64>())
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Smallest `θ ≥ 0` with `Σ clip(x + θ, 0, 1) ≥ budget`, by bisection.
pub fn project_budget(x: &DVector<f64>, budget: f64) -> DVector<f64> {
    let clip = |theta: f64| x.map(|v| (v + theta).clamp(0.0, 1.0));
    let boxed = clip(0.0);
    if boxed.sum() >= budget {
        return boxed;
    }
    let (mut lo, mut hi) = (0.0, 1.0 - x.min() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clip(mid).sum() >= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    clip(hi)
}

/// `‖sᵀ V (I-Λ) diag(h) Vᵀ‖²` and its gradient, formed densely.
fn dense_objective(
    spec: &SpectralDecomposition,
    s: &DVector<f64>,
    h: &DVector<f64>,
) -> (f64, DVector<f64>) {
    let v = spec.eigenvectors();
    let n = spec.n();
    let mut middle = DMatrix::zeros(n, n);
    for k in 0..n {
        middle[(k, k)] = (1.0 - spec.eigenvalues()[k]) * h[k];
    }
    let row = s.transpose() * v * middle * v.transpose();
    let value = row.norm_squared();
    let sv = s.transpose() * v;
    let rv = &row * v;
    let grad = DVector::from_fn(n, |k, _| {
        2.0 * rv[k] * (1.0 - spec.eigenvalues()[k]) * sv[k]
    });
    (value, grad)
}

/// Accelerated projected gradient (FISTA with adaptive restart) on the
/// dense bias measure; returns `(h, ρ)`.
pub fn projected_gradient_oracle(
    spec: &SpectralDecomposition,
    s: &DVector<f64>,
    tau: f64,
    iterations: usize,
) -> (DVector<f64>, f64) {
    let n = spec.n();
    let budget = n as f64 * tau;
    let mut lipschitz: f64 = 0.0;
    let sv = s.transpose() * spec.eigenvectors();
    for k in 0..n {
        lipschitz = lipschitz.max(2.0 * ((1.0 - spec.eigenvalues()[k]) * sv[k]).powi(2));
    }
    let step = 1.0 / lipschitz.max(1e-300);
    let mut h = project_budget(&DVector::from_element(n, tau), budget);
    let mut y = h.clone();
    let mut t = 1.0f64;
    let mut last = f64::INFINITY;
    for _ in 0..iterations {
        let (_, g) = dense_objective(spec, s, &y);
        let next = project_budget(&(&y - g * step), budget);
        let (value, _) = dense_objective(spec, s, &next);
        if value > last {
            // restart momentum
            t = 1.0;
            y = h.clone();
            last = f64::INFINITY;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &next + (&next - &h) * ((t - 1.0) / t_next);
        h = next;
        t = t_next;
        last = value;
    }
    let (value, _) = dense_objective(spec, s, &h);
    (h, value.sqrt())
}

/// Generic LP `min mᵀh  s.t.  0 ≤ h ≤ 1, Σh ≥ nτ` through a simplex solver.
pub fn lp_oracle(m: &DVector<f64>, tau: f64) -> f64 {
    use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = m.iter().map(|&c| problem.add_var(c, (0.0, 1.0))).collect();
    let mut sum = LinearExpr::empty();
    for &v in &vars {
        sum.add(v, 1.0);
    }
    problem.add_constraint(sum, ComparisonOp::Ge, m.len() as f64 * tau);
    let solution = problem.solve().expect("LP oracle failed");
    vars.iter()
        .zip(m.iter())
        .map(|(&v, &c)| c * solution[v])
        .sum()
}
