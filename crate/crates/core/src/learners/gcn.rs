// SPDX-License-Identifier: Apache-2.0

//! Two-layer GCN with optional filter sublayers:
//!
//! ```text
//! X̄ = P X        (before layer 1)
//! H₁ = relu(Â X̄ W₁)
//! H̄₁ = P H₁      (before layer 2)
//! logits = Â H̄₁ W₂
//! ```
//!
//! where `P = V diag(h̃) Vᵀ`. Since `P` is fixed, `Â X̄` and `Â P` are
//! formed once and training only touches `W₁` and `W₂`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{threshold_scores, Placement};
use crate::apply::{apply_frequency, filter_matrix};
use crate::data::{SignalSet, Split};
use crate::design::FilterSpec;
use crate::error::{check_len, Error, Result};
use crate::graph::NormalizedOperators;
use crate::spectral::SpectralDecomposition;

const INIT_STREAM: u64 = 4;
const CLASSES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Plain full-batch gradient descent.
    Gd,
    #[default]
    Adam,
}

impl std::str::FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(Optimizer::Gd),
            "adam" => Ok(Optimizer::Adam),
            other => Err(Error::InvalidArgument(format!(
                "unknown optimizer {other:?} (expected gd or adam)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GcnConfig {
    pub hidden: usize,
    pub step_size: f64,
    pub epochs: usize,
    pub weight_decay: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for GcnConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            step_size: 0.01,
            epochs: 300,
            weight_decay: 1e-5,
            seed: 0,
            optimizer: Optimizer::Adam,
        }
    }
}

/// Fixed inputs of one training problem.
#[derive(Debug, Clone)]
pub struct GcnProblem {
    /// `Â X̄`, `n × F`.
    ax: DMatrix<f64>,
    /// `Â P` (or `Â`), `n × n`.
    propagate: DMatrix<f64>,
    /// Rows of `propagate` at the training nodes.
    propagate_train: DMatrix<f64>,
    /// Output filter for [`Placement::Post`].
    output_filter: Option<DMatrix<f64>>,
    train: Vec<usize>,
    /// Class index per training node: 0 for `-1`, 1 for `+1`.
    targets: Vec<usize>,
    weight_decay: f64,
}

impl GcnProblem {
    pub fn new(
        ops: &NormalizedOperators,
        spec: &SpectralDecomposition,
        signals: &SignalSet,
        filt: Option<&FilterSpec>,
        placement: Placement,
        train: &[usize],
        weight_decay: f64,
    ) -> Result<Self> {
        let n = ops.n();
        check_len("signal rows", n, signals.n())?;
        check_len("spectrum size", n, spec.n())?;
        if signals.features.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "GCN needs at least one feature".into(),
            ));
        }
        let mut targets = Vec::with_capacity(train.len());
        for &i in train {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            match signals.labels[i] {
                Some(y) => targets.push(usize::from(y > 0)),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "training node {i} has no label"
                    )))
                }
            }
        }
        for (class, label) in [(0, -1), (1, 1)] {
            if !targets.contains(&class) {
                return Err(Error::EmptyClass(label));
            }
        }

        let filt = filt.filter(|_| placement != Placement::None);
        let features = match filt {
            Some(f) if placement.before_layer1() => apply_frequency(spec, f, &signals.features)?,
            _ => signals.features.clone(),
        };
        let propagate = match filt {
            Some(f) if placement.before_layer2() => ops.a_hat() * filter_matrix(spec, f)?,
            _ => ops.a_hat().clone(),
        };
        let output_filter = match filt {
            Some(f) if placement == Placement::Post => Some(filter_matrix(spec, f)?),
            _ => None,
        };
        let propagate_train = propagate.select_rows(train);
        Ok(Self {
            ax: ops.a_hat() * features,
            propagate,
            propagate_train,
            output_filter,
            train: train.to_vec(),
            targets,
            weight_decay,
        })
    }

    pub fn n(&self) -> usize {
        self.ax.nrows()
    }

    pub fn features(&self) -> usize {
        self.ax.ncols()
    }

    /// Full logits, `n × 2`.
    pub fn logits(&self, w1: &DMatrix<f64>, w2: &DMatrix<f64>) -> DMatrix<f64> {
        let h1 = (&self.ax * w1).map(relu);
        &self.propagate * h1 * w2
    }

    /// Training loss (mean NLL plus `(λ/2)(‖W₁‖² + ‖W₂‖²)`) and its gradients.
    pub fn loss_and_gradient(
        &self,
        w1: &DMatrix<f64>,
        w2: &DMatrix<f64>,
    ) -> (f64, DMatrix<f64>, DMatrix<f64>) {
        let z1 = &self.ax * w1;
        let h1 = z1.map(relu);
        let g = &self.propagate_train * &h1;
        let z2 = &g * w2;

        let t = self.train.len() as f64;
        let mut nll = 0.0;
        let mut dz2 = DMatrix::zeros(z2.nrows(), CLASSES);
        for (r, &target) in self.targets.iter().enumerate() {
            let (log_p, p) = log_softmax(z2[(r, 0)], z2[(r, 1)]);
            nll -= log_p[target];
            for c in 0..CLASSES {
                dz2[(r, c)] = (p[c] - f64::from(u8::from(c == target))) / t;
            }
        }
        let decay = 0.5 * self.weight_decay * (w1.norm_squared() + w2.norm_squared());
        let loss = nll / t + decay;

        let dw2 = g.tr_mul(&dz2) + w2 * self.weight_decay;
        let dh1 = self.propagate_train.tr_mul(&(dz2 * w2.transpose()));
        let dz1 = dh1.zip_map(&z1, |d, z| if z > 0.0 { d } else { 0.0 });
        let dw1 = self.ax.tr_mul(&dz1) + w1 * self.weight_decay;
        (loss, dw1, dw2)
    }

    /// Logit difference `z₊ - z₋` per node, filtered for post placement.
    fn scores(&self, logits: &DMatrix<f64>) -> Vec<f64> {
        let diff = logits.column(1) - logits.column(0);
        match &self.output_filter {
            Some(p) => (p * diff).as_slice().to_vec(),
            None => diff.as_slice().to_vec(),
        }
    }
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

fn log_softmax(a: f64, b: f64) -> ([f64; 2], [f64; 2]) {
    let m = a.max(b);
    let log_z = m + ((a - m).exp() + (b - m).exp()).ln();
    let log_p = [a - log_z, b - log_z];
    (log_p, [log_p[0].exp(), log_p[1].exp()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub w1: DMatrix<f64>,
    pub w2: DMatrix<f64>,
    pub placement: Placement,
    pub config: GcnConfig,
}

impl GcnModel {
    /// Glorot-uniform weights drawn from the config seed.
    pub fn init(features: usize, placement: Placement, config: GcnConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(INIT_STREAM);
        let mut glorot = |rows: usize, cols: usize| {
            let a = (6.0 / (rows + cols) as f64).sqrt();
            DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-a..a))
        };
        let w1 = glorot(features, config.hidden);
        let w2 = glorot(config.hidden, CLASSES);
        Self {
            w1,
            w2,
            placement,
            config,
        }
    }

    pub fn hidden(&self) -> usize {
        self.w1.ncols()
    }

    /// Soft scores and `{-1, +1}` predictions.
    pub fn predict(&self, problem: &GcnProblem) -> (Vec<i8>, Vec<f64>) {
        let scores = problem.scores(&problem.logits(&self.w1, &self.w2));
        (threshold_scores(&scores, 0.0), scores)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub val_acc: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GcnRun {
    pub model: GcnModel,
    pub predictions: Vec<i8>,
    pub soft_scores: Vec<f64>,
    pub curve: Vec<EpochStats>,
}

struct Adam {
    m: [DMatrix<f64>; 2],
    v: [DMatrix<f64>; 2],
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(w1: &DMatrix<f64>, w2: &DMatrix<f64>) -> Self {
        let zeros = |w: &DMatrix<f64>| DMatrix::zeros(w.nrows(), w.ncols());
        Self {
            m: [zeros(w1), zeros(w2)],
            v: [zeros(w1), zeros(w2)],
            t: 0,
        }
    }

    fn step(&mut self, lr: f64, weights: [&mut DMatrix<f64>; 2], grads: [&DMatrix<f64>; 2]) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for (k, (w, g)) in weights.into_iter().zip(grads).enumerate() {
            self.m[k].zip_apply(g, |m, g| *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g);
            self.v[k].zip_apply(g, |v, g| {
                *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g
            });
            for ((w, m), v) in w.iter_mut().zip(self.m[k].iter()).zip(self.v[k].iter()) {
                *w -= lr * (m / c1) / ((v / c2).sqrt() + Self::EPS);
            }
        }
    }
}

fn accuracy(predictions: &[i8], signals: &SignalSet, nodes: &[usize]) -> Option<f64> {
    if nodes.is_empty() {
        return None;
    }
    let correct = nodes
        .iter()
        .filter(|&&i| signals.labels[i] == Some(predictions[i]))
        .count();
    Some(correct as f64 / nodes.len() as f64)
}

/// Full-batch training on `split.train`; the curve records loss and accuracy
/// before each update.
pub fn train_gcn(
    ops: &NormalizedOperators,
    spec: &SpectralDecomposition,
    signals: &SignalSet,
    filt: Option<&FilterSpec>,
    placement: Placement,
    split: &Split,
    cfg: &GcnConfig,
) -> Result<GcnRun> {
    if cfg.hidden == 0 || !(cfg.step_size > 0.0) || !(cfg.weight_decay >= 0.0) {
        return Err(Error::Domain(
            "GCN needs hidden > 0, step size > 0 and weight decay >= 0".into(),
        ));
    }
    let problem = GcnProblem::new(
        ops,
        spec,
        signals,
        filt,
        placement,
        &split.train,
        cfg.weight_decay,
    )?;
    let mut model = GcnModel::init(problem.features(), placement, *cfg);
    let mut adam = Adam::new(&model.w1, &model.w2);
    let mut curve = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (loss, g1, g2) = problem.loss_and_gradient(&model.w1, &model.w2);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss });
        }
        let (predictions, _) = model.predict(&problem);
        curve.push(EpochStats {
            epoch,
            loss,
            train_acc: accuracy(&predictions, signals, &split.train).unwrap_or(f64::NAN),
            val_acc: accuracy(&predictions, signals, &split.val),
        });
        match cfg.optimizer {
            Optimizer::Gd => {
                model.w1 -= g1 * cfg.step_size;
                model.w2 -= g2 * cfg.step_size;
            }
            Optimizer::Adam => adam.step(cfg.step_size, [&mut model.w1, &mut model.w2], [&g1, &g2]),
        }
    }
    if model
        .w1
        .iter()
        .chain(model.w2.iter())
        .any(|w| !w.is_finite())
    {
        return Err(Error::NonFiniteLoss {
            epoch: cfg.epochs,
            loss: f64::NAN,
        });
    }
    let (predictions, soft_scores) = model.predict(&problem);
    Ok(GcnRun {
        model,
        predictions,
        soft_scores,
        curve,
    })
}
