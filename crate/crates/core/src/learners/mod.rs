// SPDX-License-Identifier: Apache-2.0

//! Downstream learners that consume designed filters: a two-layer GCN with
//! filter sublayers (pre-processing) and label propagation whose output is
//! filtered before thresholding (post-processing).

mod gcn;
mod label_prop;

pub use gcn::{train_gcn, EpochStats, GcnConfig, GcnModel, GcnProblem, GcnRun, Optimizer};
pub use label_prop::{label_propagation, LabelPropConfig, LabelPropOutcome};

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::apply::apply_frequency;
use crate::design::FilterSpec;
use crate::error::{check_len, Error, Result};
use crate::spectral::SpectralDecomposition;

/// Where a filter sits in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    #[default]
    None,
    /// Filter the input features.
    Pre1,
    /// Filter the hidden representation before the second aggregation.
    Pre2,
    Both,
    /// Filter the model's output signal before thresholding.
    Post,
}

impl Placement {
    pub fn before_layer1(self) -> bool {
        matches!(self, Placement::Pre1 | Placement::Both)
    }

    pub fn before_layer2(self) -> bool {
        matches!(self, Placement::Pre2 | Placement::Both)
    }
}

impl std::str::FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Placement::None),
            "pre1" => Ok(Placement::Pre1),
            "pre2" => Ok(Placement::Pre2),
            "both" => Ok(Placement::Both),
            "post" => Ok(Placement::Post),
            other => Err(Error::InvalidArgument(format!(
                "unknown placement {other:?} (expected pre1, pre2, both, post or none)"
            ))),
        }
    }
}

/// Filters soft scores in the frequency domain and thresholds them:
/// `ŷᵢ = +1` if the filtered score exceeds `threshold`, else `-1`.
pub fn postprocess_predictions(
    spec: &SpectralDecomposition,
    filt: &FilterSpec,
    soft_scores: &[f64],
    threshold: f64,
) -> Result<Vec<i8>> {
    check_len("soft scores", spec.n(), soft_scores.len())?;
    let column = DMatrix::from_column_slice(soft_scores.len(), 1, soft_scores);
    let filtered = apply_frequency(spec, filt, &column)?;
    Ok(threshold_scores(filtered.as_slice(), threshold))
}

pub fn threshold_scores(scores: &[f64], threshold: f64) -> Vec<i8> {
    scores
        .iter()
        .map(|&x| if x > threshold { 1 } else { -1 })
        .collect()
}

/// CSV `node_id,y_hat,soft_score`.
pub fn write_predictions<W: Write>(y_hat: &[i8], soft_scores: &[f64], out: W) -> Result<()> {
    check_len("soft scores", y_hat.len(), soft_scores.len())?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["node_id", "y_hat", "soft_score"])?;
    for (i, (y, s)) in y_hat.iter().zip(soft_scores).enumerate() {
        writer.write_record([i.to_string(), y.to_string(), s.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// CSV `epoch,loss,train_acc,val_acc`; `val_acc` is empty without a
/// validation split.
pub fn write_training_curve<W: Write>(curve: &[EpochStats], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["epoch", "loss", "train_acc", "val_acc"])?;
    for e in curve {
        writer.write_record([
            e.epoch.to_string(),
            e.loss.to_string(),
            e.train_acc.to_string(),
            e.val_acc.map_or(String::new(), |v| v.to_string()),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
