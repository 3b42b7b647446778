use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong while planning, building, sampling or
/// enumerating an instance.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance not sampled")]
    NotSampled,

    #[error("solution space of {size} exceeds cap {cap}")]
    SolutionCapExceeded { size: u128, cap: u128 },

    #[error("intermediate front of {size} candidates exceeds cap {cap}")]
    FrontCapExceeded { size: usize, cap: usize },

    #[error("wrong plan kind: expected {expected}, got {got}")]
    WrongPlanKind { expected: String, got: String },

    #[error("plan builds {built} objects, over the budget of {budget}")]
    BudgetExceeded { built: u64, budget: u64 },

    #[error("fixed-point solver failed: {0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the
    /// environment or a solver failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Precondition(_)
                | Error::DimensionMismatch { .. }
                | Error::NotSampled
                | Error::SolutionCapExceeded { .. }
                | Error::FrontCapExceeded { .. }
                | Error::WrongPlanKind { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
