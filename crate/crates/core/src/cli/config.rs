// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiment::{Learner, LearnerOptions};
use crate::data::{generate_sbm, load_dataset, Dataset, SbmSpec};
use crate::design::{DesignConfig, Method};
use crate::error::{Error, Result};
use crate::learners::{GcnConfig, LabelPropConfig, Placement};

/// Where filtered signals are computed for `apply`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[default]
    Frequency,
    /// Polynomial filters only.
    Vertex,
}

/// Fully resolved settings for one invocation. Loaded from an optional JSON
/// file, then overridden by flags; written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub edges: Option<PathBuf>,
    pub nodes: Option<PathBuf>,
    pub sbm: Option<SbmSpec>,
    pub out: PathBuf,
    pub seed: u64,
    pub method: Method,
    pub design: DesignConfig,
    /// Previously designed filter; replaces `method`.
    pub filter: Option<PathBuf>,
    pub learner: Learner,
    /// Defaults to `both` for the GCN and `post` for label propagation.
    pub placement: Option<Placement>,
    /// Train/validation/test fractions; defaults depend on the learner.
    pub splits: Option<[f64; 3]>,
    pub seeds: usize,
    pub stratify: bool,
    pub gcn: GcnConfig,
    pub label_prop: LabelPropConfig,
    pub taus: Vec<f64>,
    pub orders: Vec<usize>,
    pub domain: Domain,
    /// Also write the dense effective operator.
    pub write_matrix: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            edges: None,
            nodes: None,
            sbm: None,
            out: PathBuf::from("out"),
            seed: 0,
            method: Method::Direct,
            design: DesignConfig::default(),
            filter: None,
            learner: Learner::Gcn,
            placement: None,
            splits: None,
            seeds: 5,
            stratify: true,
            gcn: GcnConfig::default(),
            label_prop: LabelPropConfig::default(),
            taus: Vec::new(),
            orders: Vec::new(),
            domain: Domain::Frequency,
            write_matrix: false,
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" => Ok(Domain::Frequency),
            "vertex" => Ok(Domain::Vertex),
            other => Err(Error::InvalidArgument(format!(
                "unknown domain {other:?} (expected frequency or vertex)"
            ))),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))
    }

    /// Fills learner-dependent defaults and checks parameter domains.
    pub fn resolve(mut self) -> Result<Self> {
        self.placement
            .get_or_insert(self.learner.default_placement());
        self.splits.get_or_insert(self.learner.default_splits());
        self.design
            .validate()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if self.seeds == 0 {
            return Err(Error::InvalidArgument("--seeds must be at least 1".into()));
        }
        if !(self.label_prop.alpha > 0.0 && self.label_prop.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} outside (0, 1)",
                self.label_prop.alpha
            )));
        }
        if let Some(sbm) = &self.sbm {
            sbm.validate()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        Ok(self)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|k| self.seed + k).collect()
    }

    pub fn learner_options(&self) -> LearnerOptions {
        LearnerOptions {
            learner: self.learner,
            placement: self.placement.unwrap_or(self.learner.default_placement()),
            splits: self.splits.unwrap_or(self.learner.default_splits()),
            stratify: self.stratify,
            gcn: self.gcn,
            label_prop: self.label_prop,
        }
    }

    /// Exactly one of `edges`+`nodes` or `sbm`.
    pub fn load_dataset(&self) -> Result<Dataset> {
        match (&self.edges, &self.nodes, &self.sbm) {
            (Some(edges), Some(nodes), None) => load_dataset(edges, nodes),
            (None, None, Some(sbm)) => generate_sbm(sbm),
            (None, None, None) => Err(Error::InvalidArgument(
                "no data source: give --edges and --nodes, or --sbm".into(),
            )),
            (Some(_), None, None) | (None, Some(_), None) => Err(Error::InvalidArgument(
                "--edges and --nodes must be given together".into(),
            )),
            _ => Err(Error::InvalidArgument(
                "give either CSV files or an SBM, not both".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_fills_learner_defaults() {
        let cfg = RunConfig {
            learner: Learner::LabelProp,
            ..RunConfig::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(cfg.placement, Some(Placement::Post));
        assert_eq!(cfg.splits, Some([0.4, 0.0, 0.6]));
        assert_eq!(
            RunConfig {
                seed: 3,
                seeds: 2,
                ..RunConfig::default()
            }
            .seed_list(),
            vec![3, 4]
        );
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let mut cfg = RunConfig::default();
        cfg.design.tau = 2.0;
        assert!(matches!(cfg.resolve(), Err(Error::InvalidArgument(_))));
        let cfg = RunConfig {
            seeds: 0,
            ..RunConfig::default()
        };
        assert!(matches!(cfg.resolve(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn json_round_trip_and_partial_files() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        let partial: RunConfig =
            serde_json::from_str(r#"{"design": {"tau": 0.5}, "seeds": 2}"#).unwrap();
        assert_eq!(partial.design.tau, 0.5);
        assert_eq!(partial.design.order, 40);
        assert!(serde_json::from_str::<RunConfig>(r#"{"taus_": []}"#).is_err());
    }

    #[test]
    fn data_source_must_be_unique() {
        let cfg = RunConfig {
            edges: Some("e.csv".into()),
            ..RunConfig::default()
        };
        assert!(matches!(cfg.load_dataset(), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            RunConfig::default().load_dataset(),
            Err(Error::InvalidArgument(_))
        ));
    }
}
