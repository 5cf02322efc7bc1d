// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line each and exits nonzero if any fails.
//!
//!     cargo test --release --test acceptance

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use fairfilt::apply::{apply_frequency, apply_vertex, effective_operator};
use fairfilt::cli::{run_paired, Experiment, Learner, LearnerOptions, PairedRun};
use fairfilt::data::{generate_sbm, split, SbmSpec};
use fairfilt::design::{
    basis_matrix, design_closed_form, design_direct, design_polynomial, Basis, DesignConfig,
    FilterKind, FilterSpec,
};
use fairfilt::graph::{normalized_operators, Graph};
use fairfilt::learners::{
    label_propagation, postprocess_predictions, GcnConfig, GcnModel, GcnProblem, LabelPropConfig,
    Placement,
};
use fairfilt::metrics::{rho_dense, rho_separable, rho_upper_bound, BiasContext};
use fairfilt::spectral::{decompose, gft, SpectralDecomposition};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(
        elapsed < limit,
        format!(
            "{detail}; {:.1}s (limit {}s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn spectrum_of(g: &Graph) -> SpectralDecomposition {
    decompose(&normalized_operators(g)).expect("eigensolver")
}

/// Operator reconstruction, eigenvalue range and Parseval on random graphs.
fn spectral_decomposition() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let (mut worst_rec, mut worst_range, mut worst_parseval) = (0.0f64, 0.0f64, 0.0f64);
    for &n in &[10, 50, 200] {
        let er = erdos_renyi(
            &mut rng,
            n,
            (4.0 / n as f64).max(0.3f64.min(8.0 / n as f64)),
        );
        let (sbm, _) = block_model(
            &mut rng,
            [n / 2, n - n / 2],
            (8.0 / n as f64).min(0.9),
            1.0 / n as f64,
        );
        for g in [er, sbm] {
            let ops = normalized_operators(&g);
            let spec = decompose(&ops).map_err(|e| e.to_string())?;
            let l = ops.laplacian();
            worst_rec = worst_rec.max((l - spec.reconstruct()).norm() / l.norm());
            for &lam in spec.eigenvalues().iter() {
                worst_range = worst_range.max((-lam).max(lam - 2.0));
            }
            for _ in 0..100 {
                let z = random_signal(&mut rng, n);
                let zt = gft(&spec, &z).unwrap();
                let rel = (zt.norm_squared() - z.norm_squared()).abs() / z.norm_squared();
                worst_parseval = worst_parseval.max(rel);
            }
        }
    }
    let detail = format!(
        "reconstruction {worst_rec:.1e} (<= 1e-8), range excess {worst_range:.1e} (<= 1e-8), Parseval {worst_parseval:.1e} (<= 1e-10)"
    );
    check(
        worst_rec <= 1e-8 && worst_range <= 1e-8 && worst_parseval <= 1e-10,
        detail.clone(),
    )?;
    within(start.elapsed(), Duration::from_secs(30), detail)
}

struct Triple {
    spec: SpectralDecomposition,
    s: DVector<f64>,
    h: DVector<f64>,
}

fn random_triples(count: usize, seed: u64) -> Vec<Triple> {
    let mut rng = rng(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(4..=30);
            let g = if k % 2 == 0 {
                erdos_renyi(&mut rng, n, 0.3)
            } else {
                block_model(&mut rng, [n / 2, n - n / 2], 0.6, 0.1).0
            };
            let s = random_groups(&mut rng, n);
            let h = random_response(&mut rng, n);
            Triple {
                spec: spectrum_of(&g),
                s,
                h,
            }
        })
        .collect()
}

/// Dense, separable and effective-operator forms of the bias measure agree.
fn bias_measure_equivalence() -> Outcome {
    let (mut worst_sep, mut worst_eff) = (0.0f64, 0.0f64);
    for t in random_triples(100, 2) {
        let dense = rho_dense(&t.spec, &t.s, &t.h).unwrap();
        let ctx = BiasContext::new(&t.spec, &t.s).unwrap();
        let sep = rho_separable(&ctx, &t.h).unwrap();
        let filt = FilterSpec::from_response(t.h.as_slice().to_vec(), 0.0);
        let eff = effective_operator(&t.spec, &filt, &t.s).unwrap();
        let from_eff = (t.s.transpose() * &eff.matrix).norm();
        let scale = dense.max(1e-12);
        worst_sep = worst_sep.max((dense - sep).abs() / scale);
        worst_eff = worst_eff.max((dense - from_eff).abs() / scale);
    }
    check(
        worst_sep <= 1e-8 && worst_eff <= 1e-8,
        format!("separable {worst_sep:.1e}, effective operator {worst_eff:.1e} (<= 1e-8 relative)"),
    )
}

/// The linear bound never falls below the dense measure.
fn upper_bound() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut rng = rng(3);
    for t in random_triples(100, 2) {
        let n = t.spec.n();
        let ctx = BiasContext::new(&t.spec, &t.s).unwrap();
        let k = rng.random_range(0..n);
        let adversarial = [
            t.h.clone(),
            DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }),
            &t.h * 1e-9,
            t.h.map(|x| x.powi(8)),
        ];
        for h in &adversarial {
            let gap = rho_upper_bound(&ctx, h).unwrap() - rho_dense(&t.spec, &t.s, h).unwrap();
            worst = worst.min(gap);
        }
    }
    check(
        worst >= -1e-12,
        format!("min (bound - rho) = {worst:.3e} over 400 responses (>= -1e-12)"),
    )
}

/// Closed-form recursion against a generic simplex solve.
fn closed_form_optimality() -> Outcome {
    let mut rng = rng(4);
    let (mut worst_obj, mut worst_feas) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let n = rng.random_range(1..=50);
        let tau = [0.3, 0.5, 0.8][k % 3];
        let ctx = if k % 2 == 0 {
            let s_tilde = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
            let lambda = DVector::from_fn(n, |_, _| rng.random_range(0.0..2.0));
            BiasContext::from_parts(s_tilde, lambda).unwrap()
        } else {
            let n = n.max(4);
            let g = erdos_renyi(&mut rng, n, 0.4);
            BiasContext::new(&spectrum_of(&g), &random_groups(&mut rng, n)).unwrap()
        };
        let filt = design_closed_form(&ctx, &DesignConfig::with_tau(tau)).unwrap();
        let h = filt.response();
        let objective = ctx.m().dot(&h);
        worst_obj = worst_obj.max((objective - lp_oracle(ctx.m(), tau)).abs());
        let nn = ctx.n() as f64;
        let sum_gap = (nn * tau - h.sum()).max(0.0);
        let box_gap = h.iter().map(|&x| (-x).max(x - 1.0)).fold(0.0, f64::max);
        worst_feas = worst_feas.max(sum_gap.max(box_gap));
    }
    let hand = |m: [f64; 4], tau: f64| {
        let ctx =
            BiasContext::from_parts(DVector::from_column_slice(&m), DVector::zeros(4)).unwrap();
        design_closed_form(&ctx, &DesignConfig::with_tau(tau))
            .unwrap()
            .h_tilde
    };
    let hand_ok = hand([3.0, 1.0, 2.0, 0.5], 0.5) == vec![0.0, 1.0, 0.0, 1.0]
        && hand([3.0, 1.0, 2.0, 0.5], 0.625) == vec![0.0, 1.0, 0.5, 1.0];
    check(
        worst_obj <= 1e-9 && worst_feas <= 1e-12 && hand_ok,
        format!("objective gap {worst_obj:.1e} (<= 1e-9), feasibility {worst_feas:.1e} (<= 1e-12), hand instances {}", if hand_ok { "exact" } else { "MISMATCH" }),
    )
}

/// Water-filling against random feasible points, a projected-gradient
/// oracle on the dense measure, and the closed form.
fn direct_optimality() -> Outcome {
    let mut rng = rng(5);
    let (mut random_wins, mut worst_pg, mut dominance_fail) = (0usize, 0.0f64, 0usize);
    let mut below_oracle = false;
    for k in 0..50 {
        let n = rng.random_range(4..=16);
        let g = if k % 2 == 0 {
            erdos_renyi(&mut rng, n, 0.4)
        } else {
            block_model(&mut rng, [n / 2, n - n / 2], 0.7, 0.15).0
        };
        let spec = spectrum_of(&g);
        let s = random_groups(&mut rng, n);
        let ctx = BiasContext::new(&spec, &s).unwrap();
        let tau = rng.random_range(0.1..0.95);
        let cfg = DesignConfig::with_tau(tau);
        let direct = design_direct(&ctx, &cfg).unwrap();
        let rho = rho_dense(&spec, &s, &direct.response()).unwrap();
        for _ in 0..1000 {
            let h = project_budget(&random_response(&mut rng, n), n as f64 * tau);
            if rho_dense(&spec, &s, &h).unwrap() < rho - 1e-12 {
                random_wins += 1;
            }
        }
        let (_, pg) = projected_gradient_oracle(&spec, &s, tau, 20_000);
        worst_pg = worst_pg.max((pg - rho).abs());
        below_oracle |= pg < rho - 1e-9;
        let lp = design_closed_form(&ctx, &cfg).unwrap();
        if rho > rho_dense(&spec, &s, &lp.response()).unwrap() + 1e-12 {
            dominance_fail += 1;
        }
    }
    check(
        random_wins == 0 && worst_pg <= 1e-6 && dominance_fail == 0,
        format!("random points below optimum: {random_wins}/50000, |rho - rho_pg| max {worst_pg:.1e} (<= 1e-6){}, dominance failures {dominance_fail}", if below_oracle { " oracle lower" } else { "" }),
    )
}

fn violation(h: &DVector<f64>, tau: f64) -> f64 {
    let box_gap = h.iter().map(|&x| (-x).max(x - 1.0)).fold(0.0, f64::max);
    box_gap.max(h.len() as f64 * tau - h.sum())
}

/// Feasibility, monotonicity in L, recovery of the direct optimum at L = n
/// and vertex/frequency equivalence.
fn polynomial_design() -> Outcome {
    let mut rng = rng(6);
    let (g, s) = block_model(&mut rng, [30, 30], 0.3, 0.05);
    let ops = normalized_operators(&g);
    let spec = decompose(&ops).unwrap();
    let ctx = BiasContext::new(&spec, &s).unwrap();
    let tau = 0.5;
    let mut rhos = Vec::new();
    let mut worst_violation = 0.0f64;
    for order in [2, 4, 8, 16] {
        let cfg = DesignConfig {
            tau,
            order,
            ..DesignConfig::default()
        };
        let filt = design_polynomial(&ctx, &spec, &cfg).map_err(|e| e.to_string())?;
        worst_violation = worst_violation.max(violation(&filt.response(), tau));
        rhos.push(rho_separable(&ctx, &filt.response()).unwrap());
    }
    let monotone = rhos.windows(2).all(|w| w[1] <= w[0] + 1e-6);

    // small graph with distinct eigenvalues
    let mut recovery = 0.0f64;
    let mut found = 0;
    while found < 3 {
        let n = rng.random_range(6..=12);
        let g = erdos_renyi(&mut rng, n, 0.5);
        let spec = spectrum_of(&g);
        let lam = spec.eigenvalues();
        let gap = (1..n)
            .map(|i| lam[i] - lam[i - 1])
            .fold(f64::INFINITY, f64::min);
        if gap < 1e-3 {
            continue;
        }
        found += 1;
        let ctx = BiasContext::new(&spec, &random_groups(&mut rng, n)).unwrap();
        let cfg = DesignConfig {
            tau: 0.6,
            order: n,
            basis: Basis::Chebyshev,
            ..DesignConfig::default()
        };
        let poly = design_polynomial(&ctx, &spec, &cfg).map_err(|e| e.to_string())?;
        let direct = design_direct(&ctx, &cfg).unwrap();
        let diff = rho_separable(&ctx, &poly.response()).unwrap()
            - rho_separable(&ctx, &direct.response()).unwrap();
        recovery = recovery.max(diff.abs());
    }

    let mut worst_apply = 0.0f64;
    let x = DMatrix::from_fn(60, 3, |_, _| rng.random_range(-1.0..1.0));
    for k in 0..50 {
        let order = 1 + k % 8;
        let basis = if k % 2 == 0 {
            Basis::Monomial
        } else {
            Basis::Chebyshev
        };
        let coeffs: Vec<f64> = (0..order).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h =
            basis_matrix(spec.eigenvalues(), order, basis) * DVector::from_column_slice(&coeffs);
        let filt = FilterSpec {
            kind: FilterKind::Polynomial,
            tau: 0.0,
            order: Some(order),
            basis: Some(basis),
            h_tilde: h.as_slice().to_vec(),
            coeffs: Some(coeffs),
        };
        let freq = apply_frequency(&spec, &filt, &x).unwrap();
        let vert = apply_vertex(&ops, &filt, &x).unwrap();
        worst_apply = worst_apply.max((&freq - vert).norm() / freq.norm().max(1e-300));
    }
    check(
        worst_violation <= 1e-6 && monotone && recovery <= 1e-4 && worst_apply <= 1e-8,
        format!(
            "violation {worst_violation:.1e} (<= 1e-6), rho over L=2,4,8,16 {:?} ({}), L=n recovery {recovery:.1e} (<= 1e-4), vertex/frequency {worst_apply:.1e} (<= 1e-8)",
            rhos.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>(),
            if monotone { "nonincreasing" } else { "NOT monotone" }
        ),
    )
}

/// Analytic GCN gradients against central differences.
fn gcn_gradient_check() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(7);
    let g = erdos_renyi(&mut rng, 8, 0.5);
    let ops = normalized_operators(&g);
    let spec = decompose(&ops).unwrap();
    let signals = fairfilt::data::SignalSet {
        sensitive: vec![1, 1, 1, 1, -1, -1, -1, -1],
        labels: [1, -1, 1, -1, 1, -1, 1, -1].map(Some).to_vec(),
        features: DMatrix::from_fn(8, 3, |_, _| rng.random_range(-1.0..1.0)),
    };
    let filt = FilterSpec::from_response(random_response(&mut rng, 8).as_slice().to_vec(), 0.0);
    let train: Vec<usize> = (0..8).collect();
    let problem = GcnProblem::new(
        &ops,
        &spec,
        &signals,
        Some(&filt),
        Placement::Both,
        &train,
        1e-3,
    )
    .unwrap();
    let model = GcnModel::init(
        3,
        Placement::Both,
        GcnConfig {
            hidden: 4,
            seed: 7,
            ..GcnConfig::default()
        },
    );
    let (_, g1, g2) = problem.loss_and_gradient(&model.w1, &model.w2);
    let eps = 1e-6;
    let mut worst = 0.0f64;
    for layer in 0..2 {
        let analytic = if layer == 0 { &g1 } else { &g2 };
        for k in 0..analytic.len() {
            let mut plus = [model.w1.clone(), model.w2.clone()];
            let mut minus = plus.clone();
            plus[layer][k] += eps;
            minus[layer][k] -= eps;
            let fd = (problem.loss_and_gradient(&plus[0], &plus[1]).0
                - problem.loss_and_gradient(&minus[0], &minus[1]).0)
                / (2.0 * eps);
            let denom = fd.abs().max(analytic[k].abs()).max(1e-10);
            worst = worst.max((fd - analytic[k]).abs() / denom);
        }
    }
    let detail = format!(
        "max relative error {worst:.1e} over {} weights (< 1e-4)",
        g1.len() + g2.len()
    );
    check(worst < 1e-4, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(5), detail)
}

/// Calibrated operating points for the two learners (see the sweep notes
/// in the README).
const GCN_TAU: f64 = 0.8;
const GCN_PLACEMENT: Placement = Placement::Pre1;
const POST_TAU: f64 = 0.9988;
const SBM_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

fn mean(runs: &[PairedRun], f: fn(&PairedRun) -> f64) -> f64 {
    runs.iter().map(f).sum::<f64>() / runs.len() as f64
}

/// Fairness gaps shrink with the filter while accuracy drops by at most 5
/// points, for the GCN and for post-processed label propagation.
fn fairness_direction() -> Outcome {
    let start = Instant::now();
    let (mut gcn, mut post) = (Vec::new(), Vec::new());
    for &seed in &SBM_SEEDS {
        let dataset = generate_sbm(&SbmSpec {
            seed,
            ..SbmSpec::default()
        })
        .map_err(|e| e.to_string())?;
        let ops = normalized_operators(&dataset.graph);
        let spec = decompose(&ops).unwrap();
        let ctx = BiasContext::new(&spec, &dataset.signals.s_signal()).unwrap();
        let exp = Experiment {
            dataset: &dataset,
            ops: &ops,
            spec: &spec,
        };

        let filt = design_direct(&ctx, &DesignConfig::with_tau(GCN_TAU)).unwrap();
        let opts = LearnerOptions {
            placement: GCN_PLACEMENT,
            ..LearnerOptions::new(Learner::Gcn)
        };
        gcn.push(run_paired(exp, &filt, &opts, seed).map_err(|e| e.to_string())?);

        let filt = design_direct(&ctx, &DesignConfig::with_tau(POST_TAU)).unwrap();
        let opts = LearnerOptions::new(Learner::LabelProp);
        post.push(run_paired(exp, &filt, &opts, seed).map_err(|e| e.to_string())?);
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, runs) in [("gcn", &gcn), ("label-prop", &post)] {
        let sp = (
            mean(runs, |r| r.without.delta_sp),
            mean(runs, |r| r.with.delta_sp),
        );
        let eo = (
            mean(runs, |r| r.without.delta_eo),
            mean(runs, |r| r.with.delta_eo),
        );
        let acc = (
            mean(runs, |r| r.without.accuracy),
            mean(runs, |r| r.with.accuracy),
        );
        ok &= sp.1 < sp.0 && eo.1 < eo.0 && acc.0 - acc.1 <= 0.05;
        parts.push(format!(
            "{name}: dSP {:.2}->{:.2}%, dEO {:.2}->{:.2}%, acc {:.2}->{:.2}%",
            100.0 * sp.0,
            100.0 * sp.1,
            100.0 * eo.0,
            100.0 * eo.1,
            100.0 * acc.0,
            100.0 * acc.1
        ));
    }
    let detail = parts.join("; ");
    check(ok, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(180), detail)
}

/// The filter narrows the intra/inter weight gap of the effective operator.
fn effective_balancing() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for &seed in &SBM_SEEDS {
        let dataset = generate_sbm(&SbmSpec {
            seed,
            ..SbmSpec::default()
        })
        .map_err(|e| e.to_string())?;
        let spec = decompose(&normalized_operators(&dataset.graph)).unwrap();
        let s = dataset.signals.s_signal();
        let ctx = BiasContext::new(&spec, &s).unwrap();
        let filt = design_direct(&ctx, &DesignConfig::with_tau(GCN_TAU)).unwrap();
        let before = effective_operator(&spec, &FilterSpec::all_pass(dataset.n()), &s)
            .unwrap()
            .gap();
        let after = effective_operator(&spec, &filt, &s).unwrap().gap();
        ok &= after < before;
        parts.push(format!("{before:.1}->{after:.1}"));
    }
    check(
        ok,
        format!("|intra - inter| per seed: {}", parts.join(", ")),
    )
}

/// τ = 0 gives ρ = 0 and a single predicted class.
fn trivial_solution() -> Outcome {
    let dataset = generate_sbm(&SbmSpec::default()).map_err(|e| e.to_string())?;
    let ops = normalized_operators(&dataset.graph);
    let spec = decompose(&ops).unwrap();
    let ctx = BiasContext::new(&spec, &dataset.signals.s_signal()).unwrap();
    let filt = design_direct(&ctx, &DesignConfig::with_tau(0.0)).unwrap();
    let rho = rho_separable(&ctx, &filt.response()).unwrap();
    let part = split(&dataset, [0.4, 0.0, 0.6], 0, true).unwrap();
    let seeds = fairfilt::cli::seed_labels(&dataset, &part);
    let scores = label_propagation(&ops, &seeds, &LabelPropConfig::default())
        .unwrap()
        .scores;
    let y_hat = postprocess_predictions(&spec, &filt, &scores, 0.0).unwrap();
    let report = fairfilt::cli::report_on(&dataset, &y_hat, &part.test).unwrap();
    let one_class = y_hat.iter().all(|&y| y == y_hat[0]);
    let labels: Vec<i8> = part
        .test
        .iter()
        .filter_map(|&i| dataset.signals.labels[i])
        .collect();
    let share = labels.iter().filter(|&&y| y == y_hat[0]).count() as f64 / labels.len() as f64;
    let positive = labels.iter().filter(|&&y| y == 1).count() as f64 / labels.len() as f64;
    let majority = positive.max(1.0 - positive);
    check(
        rho == 0.0
            && one_class
            && (report.accuracy - share).abs() < 1e-12
            && (report.accuracy - majority).abs() <= 0.05,
        format!(
            "rho = {rho}, predictions all {}, accuracy {:.2}% vs majority rate {:.2}%",
            y_hat[0],
            100.0 * report.accuracy,
            100.0 * majority
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("spectral decomposition", spectral_decomposition),
        ("bias measure equivalence", bias_measure_equivalence),
        ("linear upper bound", upper_bound),
        ("closed-form LP optimality", closed_form_optimality),
        ("direct design optimality", direct_optimality),
        ("polynomial design", polynomial_design),
        ("GCN gradient check", gcn_gradient_check),
        ("end-to-end fairness direction", fairness_direction),
        ("effective operator balancing", effective_balancing),
        ("trivial solution", trivial_solution),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
