// SPDX-License-Identifier: Apache-2.0

//! Attributed graphs: CSV ingestion, a seeded two-group stochastic block
//! model, and deterministic train/validation/test splits.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`. Independent purposes draw from separate ChaCha streams
//! of the same key, so changing one consumer never perturbs another.

mod io;
mod sbm;
mod split;

pub use io::{load_dataset, read_dataset, save_dataset, write_edges, write_nodes};
pub use sbm::{generate_sbm, SbmSpec};
pub use split::{split, Split};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Node-aligned signals. `labels[i]` is `None` for unlabeled nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    pub sensitive: Vec<i8>,
    pub labels: Vec<Option<i8>>,
    pub features: DMatrix<f64>,
}

impl SignalSet {
    pub fn n(&self) -> usize {
        self.sensitive.len()
    }

    pub fn s_signal(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.sensitive.iter().map(|&s| f64::from(s)))
    }

    /// The label signal; every node must be labeled.
    pub fn y_signal(&self) -> Result<DVector<f64>> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, y)| {
                y.map(f64::from)
                    .ok_or_else(|| Error::Domain(format!("node {i} has no label")))
            })
            .collect::<Result<Vec<_>>>()
            .map(DVector::from_vec)
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.labels.iter().all(Option::is_some)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.n();
        crate::error::check_len("labels", n, self.labels.len())?;
        crate::error::check_len("feature rows", n, self.features.nrows())?;
        if !self.sensitive.contains(&-1) || !self.sensitive.contains(&1) {
            return Err(Error::Domain(
                "sensitive attribute must take both values".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// `"csv:<edges>,<nodes>"` or `"sbm"`.
    pub source: String,
    pub seed: Option<u64>,
    /// Seed actually used after connectivity retries.
    pub effective_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graph: Graph,
    pub signals: SignalSet,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(graph: Graph, signals: SignalSet, provenance: Provenance) -> Result<Self> {
        crate::error::check_len("signals", graph.n(), signals.n())?;
        signals.validate()?;
        Ok(Self {
            graph,
            signals,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}
