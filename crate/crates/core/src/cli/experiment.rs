// SPDX-License-Identifier: Apache-2.0

//! Paired with/without-filter evaluation over seeds, and hyperparameter
//! sweeps built on it.

use serde::{Deserialize, Serialize};

use crate::apply::apply_frequency;
use crate::data::{split, Dataset, Split};
use crate::design::{design, objective_report, DesignConfig, FilterSpec, Method};
use crate::error::{Error, Result};
use crate::graph::NormalizedOperators;
use crate::learners::{
    label_propagation, threshold_scores, train_gcn, GcnConfig, LabelPropConfig, Placement,
};
use crate::metrics::{group_fairness, BiasContext, EvalReport};
use crate::spectral::SpectralDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Learner {
    #[default]
    Gcn,
    LabelProp,
}

impl std::str::FromStr for Learner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcn" => Ok(Learner::Gcn),
            "label-prop" => Ok(Learner::LabelProp),
            other => Err(Error::InvalidArgument(format!(
                "unknown learner {other:?} (expected gcn or label-prop)"
            ))),
        }
    }
}

impl Learner {
    pub fn default_placement(self) -> Placement {
        match self {
            Learner::Gcn => Placement::Both,
            Learner::LabelProp => Placement::Post,
        }
    }

    pub fn default_splits(self) -> [f64; 3] {
        match self {
            Learner::Gcn => [0.4, 0.3, 0.3],
            Learner::LabelProp => [0.4, 0.0, 0.6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LearnerOptions {
    pub learner: Learner,
    pub placement: Placement,
    pub splits: [f64; 3],
    pub stratify: bool,
    pub gcn: GcnConfig,
    pub label_prop: LabelPropConfig,
}

impl LearnerOptions {
    pub fn new(learner: Learner) -> Self {
        Self {
            learner,
            placement: learner.default_placement(),
            splits: learner.default_splits(),
            stratify: true,
            gcn: GcnConfig::default(),
            label_prop: LabelPropConfig::default(),
        }
    }
}

/// A dataset with its operators and spectrum, computed once.
#[derive(Debug, Clone, Copy)]
pub struct Experiment<'a> {
    pub dataset: &'a Dataset,
    pub ops: &'a NormalizedOperators,
    pub spec: &'a SpectralDecomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedRun {
    pub seed: u64,
    pub without: EvalReport,
    pub with: EvalReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub accuracy: Summary,
    pub delta_sp: Summary,
    pub delta_eo: Summary,
}

impl MetricSummary {
    pub fn of(reports: &[&EvalReport]) -> Self {
        let pick = |f: fn(&EvalReport) -> f64| {
            Summary::of(&reports.iter().map(|r| f(r)).collect::<Vec<_>>())
        };
        Self {
            accuracy: pick(|r| r.accuracy),
            delta_sp: pick(|r| r.delta_sp),
            delta_eo: pick(|r| r.delta_eo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub runs: Vec<PairedRun>,
    pub without: MetricSummary,
    pub with: MetricSummary,
    /// Per-seed `with - without`, summarized.
    pub delta: MetricSummary,
}

impl EvalSummary {
    fn from_runs(runs: Vec<PairedRun>) -> Self {
        let without = MetricSummary::of(&runs.iter().map(|r| &r.without).collect::<Vec<_>>());
        let with = MetricSummary::of(&runs.iter().map(|r| &r.with).collect::<Vec<_>>());
        let diff = |f: fn(&EvalReport) -> f64| {
            Summary::of(
                &runs
                    .iter()
                    .map(|r| f(&r.with) - f(&r.without))
                    .collect::<Vec<_>>(),
            )
        };
        let delta = MetricSummary {
            accuracy: diff(|r| r.accuracy),
            delta_sp: diff(|r| r.delta_sp),
            delta_eo: diff(|r| r.delta_eo),
        };
        Self {
            runs,
            without,
            with,
            delta,
        }
    }
}

/// Metrics over the labeled nodes of `nodes`.
pub fn report_on(dataset: &Dataset, y_hat: &[i8], nodes: &[usize]) -> Result<EvalReport> {
    let signals = &dataset.signals;
    let labeled: Vec<usize> = nodes
        .iter()
        .copied()
        .filter(|&i| signals.labels[i].is_some())
        .collect();
    if labeled.is_empty() {
        return Err(Error::InvalidArgument(
            "evaluation split has no labeled nodes".into(),
        ));
    }
    let pick = |f: &dyn Fn(usize) -> i8| labeled.iter().map(|&i| f(i)).collect::<Vec<_>>();
    group_fairness(
        &pick(&|i| y_hat[i]),
        &pick(&|i| signals.labels[i].unwrap_or_default()),
        &pick(&|i| signals.sensitive[i]),
    )
}

/// Seed labels for label propagation: training labels, zero elsewhere.
pub fn seed_labels(dataset: &Dataset, part: &Split) -> Vec<i8> {
    let mut seeds = vec![0; dataset.n()];
    for &i in &part.train {
        seeds[i] = dataset.signals.labels[i].unwrap_or(0);
    }
    seeds
}

/// One seed: split, then the learner without and with the filter.
pub fn run_paired(
    exp: Experiment<'_>,
    filt: &FilterSpec,
    opts: &LearnerOptions,
    seed: u64,
) -> Result<PairedRun> {
    let part = split(exp.dataset, opts.splits, seed, opts.stratify)?;
    let (without, with) = match opts.learner {
        Learner::Gcn => {
            if opts.placement == Placement::Post {
                return Err(Error::InvalidArgument(
                    "the GCN takes pre1, pre2, both or none; post applies to label propagation"
                        .into(),
                ));
            }
            let cfg = GcnConfig { seed, ..opts.gcn };
            let signals = &exp.dataset.signals;
            let plain = train_gcn(
                exp.ops,
                exp.spec,
                signals,
                None,
                Placement::None,
                &part,
                &cfg,
            )?;
            let filtered = train_gcn(
                exp.ops,
                exp.spec,
                signals,
                Some(filt),
                opts.placement,
                &part,
                &cfg,
            )?;
            (plain.predictions, filtered.predictions)
        }
        Learner::LabelProp => {
            let scores =
                label_propagation(exp.ops, &seed_labels(exp.dataset, &part), &opts.label_prop)?
                    .scores;
            let threshold = opts.label_prop.threshold;
            let plain = threshold_scores(&scores, threshold);
            let filtered = match opts.placement {
                Placement::Post => filtered_scores(exp.spec, filt, &scores)
                    .map(|s| threshold_scores(&s, threshold))?,
                Placement::None => plain.clone(),
                _ => {
                    return Err(Error::InvalidArgument(
                        "label propagation takes placement post or none".into(),
                    ))
                }
            };
            (plain, filtered)
        }
    };
    Ok(PairedRun {
        seed,
        without: report_on(exp.dataset, &without, &part.test)?,
        with: report_on(exp.dataset, &with, &part.test)?,
    })
}

pub(crate) fn filtered_scores(
    spec: &SpectralDecomposition,
    filt: &FilterSpec,
    scores: &[f64],
) -> Result<Vec<f64>> {
    let column = nalgebra::DMatrix::from_column_slice(scores.len(), 1, scores);
    Ok(apply_frequency(spec, filt, &column)?.as_slice().to_vec())
}

pub fn evaluate(
    exp: Experiment<'_>,
    filt: &FilterSpec,
    opts: &LearnerOptions,
    seeds: &[u64],
) -> Result<EvalSummary> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    let runs = seeds
        .iter()
        .map(|&seed| run_paired(exp, filt, opts, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalSummary::from_runs(runs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Tau,
    Order,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub rho: f64,
    pub summary: EvalSummary,
}

/// One row per `τ` in `taus`, then one per `L` in `orders` (at `base.tau`).
/// Grid points run on separate threads; rows keep grid order.
pub fn sweep(
    exp: Experiment<'_>,
    method: Method,
    base: &DesignConfig,
    taus: &[f64],
    orders: &[usize],
    opts: &LearnerOptions,
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    if taus.is_empty() && orders.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    let ctx = BiasContext::new(exp.spec, &exp.dataset.signals.s_signal())?;
    let points: Vec<(SweepParameter, f64, DesignConfig)> = taus
        .iter()
        .map(|&tau| (SweepParameter::Tau, tau, DesignConfig { tau, ..*base }))
        .chain(orders.iter().map(|&order| {
            (
                SweepParameter::Order,
                order as f64,
                DesignConfig { order, ..*base },
            )
        }))
        .collect();
    for (_, _, cfg) in &points {
        cfg.validate()?;
    }
    let ctx = &ctx;
    std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .iter()
            .map(|&(parameter, value, cfg)| {
                scope.spawn(move || -> Result<SweepRow> {
                    let filt = design(method, ctx, exp.spec, &cfg)?;
                    let rho = objective_report(ctx, &filt)?.rho;
                    let summary = evaluate(exp, &filt, opts, seeds)?;
                    Ok(SweepRow {
                        parameter,
                        value,
                        rho,
                        summary,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 1.0).abs() < 1e-15);
        assert_eq!(Summary::of(&[4.0]).std, 0.0);
    }

    #[test]
    fn learner_defaults() {
        assert_eq!(
            LearnerOptions::new(Learner::LabelProp).splits,
            [0.4, 0.0, 0.6]
        );
        assert_eq!(Learner::Gcn.default_placement(), Placement::Both);
        assert!("svm".parse::<Learner>().is_err());
    }
}
