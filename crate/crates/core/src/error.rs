use std::path::PathBuf;

use crate::recovery::PartialRecovery;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e} exceeds {tolerance:e})")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    /// The selected atoms are linearly dependent (non-positive Cholesky pivot).
    #[error("degenerate atom set: pivot {pivot:e} at row {row} is not above {threshold:e}")]
    DegenerateAtomSet { row: usize, pivot: f64, threshold: f64 },

    /// Recovery aborted mid-run; the iterations completed so far are attached.
    #[error("recovery aborted at iteration {}: {source}", .partial.iterations + 1)]
    RecoveryAborted {
        partial: Box<PartialRecovery>,
        #[source]
        source: Box<Error>,
    },

    #[error("allocation of {required_bytes} bytes exceeds the memory cap of {cap_bytes} bytes")]
    MemoryCap { required_bytes: u128, cap_bytes: u128 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape { op, left, right }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
