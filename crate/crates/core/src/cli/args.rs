// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{Domain, RunConfig};
use super::experiment::Learner;
use crate::data::SbmSpec;
use crate::design::{Basis, Method};
use crate::error::{Error, Result};
use crate::learners::{Optimizer, Placement};

#[derive(Debug, Parser)]
#[command(
    name = "fairfilt",
    version,
    about = "Fairness-aware graph filter design"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectra of the sensitive attribute and the labels.
    Spectrum(Flags),
    /// Design a filter and report its bias measure.
    Design(Flags),
    /// Filter the node features.
    Apply(Flags),
    /// Label propagation, optionally with a post-filter.
    LabelProp(Flags),
    /// Train the two-layer GCN with filter sublayers.
    TrainGcn(Flags),
    /// Paired with/without-filter evaluation over several seeds.
    Eval(Flags),
    /// Sensitivity of the evaluation to tau and polynomial length.
    Sweep(Flags),
    /// Intra- and inter-group weight of the effective aggregation operator.
    Effective(Flags),
    /// Generate a two-group stochastic block model dataset.
    SbmGen(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Design(_) => "design",
            Command::Apply(_) => "apply",
            Command::LabelProp(_) => "label-prop",
            Command::TrainGcn(_) => "train-gcn",
            Command::Eval(_) => "eval",
            Command::Sweep(_) => "sweep",
            Command::Effective(_) => "effective",
            Command::SbmGen(_) => "sbm-gen",
        }
    }

    /// The learner a subcommand always uses, regardless of `--learner`.
    pub fn fixed_learner(&self) -> Option<Learner> {
        match self {
            Command::LabelProp(_) => Some(Learner::LabelProp),
            Command::TrainGcn(_) => Some(Learner::Gcn),
            _ => None,
        }
    }

    /// Flags merged over the config file, with the subcommand's learner.
    pub fn to_config(&self) -> Result<RunConfig> {
        self.flags().merge(self.fixed_learner())
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Spectrum(f)
            | Command::Design(f)
            | Command::Apply(f)
            | Command::LabelProp(f)
            | Command::TrainGcn(f)
            | Command::Eval(f)
            | Command::Sweep(f)
            | Command::Effective(f)
            | Command::SbmGen(f) => f,
        }
    }
}

/// Every flag is optional; unset flags keep the value from `--config` or
/// the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON run configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed for splits, initialization and SBM generation.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Generate the data from an SBM instead of reading CSV files.
    #[arg(long, help_heading = "SBM")]
    pub sbm: bool,
    #[arg(long, value_delimiter = ',', help_heading = "SBM")]
    pub sbm_sizes: Option<Vec<usize>>,
    #[arg(long, help_heading = "SBM")]
    pub p_intra: Option<f64>,
    #[arg(long, help_heading = "SBM")]
    pub p_inter: Option<f64>,
    /// Probability that a node's label equals its group.
    #[arg(long, help_heading = "SBM")]
    pub q: Option<f64>,
    #[arg(long, help_heading = "SBM")]
    pub features: Option<usize>,
    #[arg(long, help_heading = "SBM")]
    pub snr: Option<f64>,

    /// direct, lp or poly.
    #[arg(long, help_heading = "Design")]
    pub method: Option<Method>,
    #[arg(long, help_heading = "Design")]
    pub tau: Option<f64>,
    /// Number of polynomial coefficients.
    #[arg(long, help_heading = "Design")]
    pub order: Option<usize>,
    /// monomial or chebyshev.
    #[arg(long, help_heading = "Design")]
    pub basis: Option<Basis>,
    #[arg(long, help_heading = "Design")]
    pub tolerance: Option<f64>,
    #[arg(long, help_heading = "Design")]
    pub max_iterations: Option<usize>,
    /// Filter JSON from `design`, used instead of designing one.
    #[arg(long, help_heading = "Design")]
    pub filter: Option<PathBuf>,

    /// gcn or label-prop.
    #[arg(long, help_heading = "Learning")]
    pub learner: Option<Learner>,
    /// pre1, pre2, both, post or none.
    #[arg(long, help_heading = "Learning")]
    pub placement: Option<Placement>,
    #[arg(long, value_delimiter = ',', help_heading = "Learning")]
    pub splits: Option<Vec<f64>>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, help_heading = "Learning")]
    pub seeds: Option<usize>,
    /// Split without (s, y) stratification.
    #[arg(long, help_heading = "Learning")]
    pub no_stratify: bool,
    #[arg(long, help_heading = "Learning")]
    pub hidden: Option<usize>,
    #[arg(long, help_heading = "Learning")]
    pub lr: Option<f64>,
    #[arg(long, help_heading = "Learning")]
    pub epochs: Option<usize>,
    #[arg(long, help_heading = "Learning")]
    pub weight_decay: Option<f64>,
    /// gd or adam.
    #[arg(long, help_heading = "Learning")]
    pub optimizer: Option<Optimizer>,
    #[arg(long, help_heading = "Learning")]
    pub alpha: Option<f64>,
    #[arg(long, help_heading = "Learning")]
    pub threshold: Option<f64>,
    /// Reset labeled nodes after every propagation step.
    #[arg(long, help_heading = "Learning")]
    pub clamp: bool,

    /// Comma-separated tau grid.
    #[arg(long, value_delimiter = ',', help_heading = "Sweep")]
    pub taus: Option<Vec<f64>>,
    /// Comma-separated polynomial length grid.
    #[arg(long, value_delimiter = ',', help_heading = "Sweep")]
    pub orders: Option<Vec<usize>>,

    /// frequency or vertex (polynomial filters).
    #[arg(long, help_heading = "Output")]
    pub domain: Option<Domain>,
    /// Also write the dense effective operator as CSV.
    #[arg(long, help_heading = "Output")]
    pub matrix: bool,
}

macro_rules! set {
    ($target:expr, $value:expr) => {
        if let Some(v) = $value {
            $target = v;
        }
    };
}

impl Flags {
    /// Config file (or defaults) overridden by the given flags.
    pub fn to_config(&self) -> Result<RunConfig> {
        self.merge(None)
    }

    fn merge(&self, fixed_learner: Option<Learner>) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let f = self.clone();
        if f.edges.is_some() || f.nodes.is_some() {
            cfg.sbm = None;
            cfg.edges = f.edges;
            cfg.nodes = f.nodes;
        }
        set!(cfg.out, f.out);
        set!(cfg.seed, f.seed);

        let sbm_flags = f.sbm
            || f.sbm_sizes.is_some()
            || f.p_intra.is_some()
            || f.p_inter.is_some()
            || f.q.is_some()
            || f.features.is_some()
            || f.snr.is_some();
        if sbm_flags {
            if cfg.edges.is_some() || cfg.nodes.is_some() {
                return Err(Error::InvalidArgument(
                    "give either CSV files or an SBM, not both".into(),
                ));
            }
            let mut sbm = cfg.sbm.unwrap_or(SbmSpec {
                seed: cfg.seed,
                ..SbmSpec::default()
            });
            if let Some(sizes) = f.sbm_sizes {
                sbm.sizes = sizes.try_into().map_err(|_| {
                    Error::InvalidArgument("--sbm-sizes takes two comma-separated sizes".into())
                })?;
            }
            set!(sbm.p_intra, f.p_intra);
            set!(sbm.p_inter, f.p_inter);
            set!(sbm.q, f.q);
            set!(sbm.features, f.features);
            set!(sbm.snr, f.snr);
            set!(sbm.seed, f.seed);
            cfg.sbm = Some(sbm);
        }

        set!(cfg.method, f.method);
        set!(cfg.design.tau, f.tau);
        set!(cfg.design.order, f.order);
        set!(cfg.design.basis, f.basis);
        set!(cfg.design.tolerance, f.tolerance);
        set!(cfg.design.max_iterations, f.max_iterations);
        if f.filter.is_some() {
            cfg.filter = f.filter;
        }

        set!(cfg.learner, f.learner);
        set!(cfg.learner, fixed_learner);
        if f.placement.is_some() {
            cfg.placement = f.placement;
        }
        if let Some(s) = f.splits {
            cfg.splits = Some(s.try_into().map_err(|_| {
                Error::InvalidArgument("--splits takes three comma-separated fractions".into())
            })?);
        }
        set!(cfg.seeds, f.seeds);
        if f.no_stratify {
            cfg.stratify = false;
        }
        set!(cfg.gcn.hidden, f.hidden);
        set!(cfg.gcn.step_size, f.lr);
        set!(cfg.gcn.epochs, f.epochs);
        set!(cfg.gcn.weight_decay, f.weight_decay);
        set!(cfg.gcn.optimizer, f.optimizer);
        set!(cfg.label_prop.alpha, f.alpha);
        set!(cfg.label_prop.threshold, f.threshold);
        if f.clamp {
            cfg.label_prop.clamp_labeled = true;
        }
        set!(cfg.taus, f.taus);
        set!(cfg.orders, f.orders);
        set!(cfg.domain, f.domain);
        if f.matrix {
            cfg.write_matrix = true;
        }
        cfg.resolve()
    }
}
