// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} has no incident edges")]
    IsolatedNode(usize),

    #[error("node index {index} out of range for a graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine stopped without meeting its tolerance. Where a
    /// usable iterate exists it is attached.
    #[error("{routine} did not converge after {iterations} iterations (residual {residual:.3e})")]
    ConvergenceFailure {
        routine: &'static str,
        iterations: usize,
        residual: f64,
        last_iterate: Option<Vec<f64>>,
    },

    #[error("empty conditioning cell: {0}")]
    EmptyGroup(String),

    #[error("stratification impossible, empty cell: {0}")]
    EmptyCell(String),

    #[error("training split has no nodes of class {0}")]
    EmptyClass(i8),

    #[error("non-finite loss at epoch {epoch}: {loss}")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    #[error("parse error in {file} at line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("sensitive attribute must be -1 or 1 ({file}, line {line}, got {value:?})")]
    NonBinarySensitive {
        file: String,
        line: usize,
        value: String,
    },

    #[error("graph generation failed: {0}")]
    GenerationFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a numerical routine rather than of the input data.
    pub fn is_solver_error(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. } | Error::NonFiniteLoss { .. }
        )
    }

    pub(crate) fn dims(what: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what,
            expected,
            found,
        }
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dims(what, expected, found))
    }
}
