use thiserror::Error;

use crate::extensions::VerificationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("structure constants are not antisymmetric at (i={i}, j={j}, k={k})")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("actions do not form a matched pair")]
    NotMatched(Box<VerificationReport>),

    #[error("not a 2-cocycle extension")]
    NotACocycle(Box<VerificationReport>),

    #[error("index set is not a subalgebra: [e{i}, e{j}] leaves the span")]
    NotASubalgebra { i: usize, j: usize },

    #[error("observable has no gradient available for exact evaluation")]
    GradientUnavailable,

    #[error("dissipation variant requires a Casimir observable")]
    MissingCasimir,

    #[error("dissipation variant requires a psi matrix")]
    MissingPsi,

    #[error("system has no entropy observable")]
    MissingEntropy,

    #[error("unknown monitor {0:?}")]
    UnknownMonitor(String),

    #[error("state became non-finite at step {step}")]
    NonFiniteState { step: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by malformed input rather than a failed check.
    pub fn is_schema(&self) -> bool {
        matches!(
            self,
            Error::Schema(_) | Error::Shape(_) | Error::Io { .. } | Error::UnknownEntry(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
