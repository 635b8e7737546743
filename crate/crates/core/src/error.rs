use thiserror::Error;

use crate::partition::PartitionResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure classes surfaced to callers (and as CLI exit categories).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Precond,
    Search,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Parse => "PARSE",
            ErrorCategory::Precond => "PRECOND",
            ErrorCategory::Search => "SEARCH",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid variety description: {0}")]
    InvalidVariety(String),

    #[error("lifted capacity {capacity} is smaller than the number of sets {sets}")]
    CapacityTooSmall { capacity: usize, sets: usize },

    #[error("ham-sandwich search exhausted after {iterations} iterations, best imbalance {best_imbalance}")]
    SearchExhausted {
        iterations: usize,
        best_imbalance: usize,
    },

    #[error("problem outside oracle scope: {0}")]
    OracleScopeExceeded(String),

    #[error("exhaustive oracle found no valid cut")]
    NoCutFound,

    #[error("partition aborted at stage {stage}: {source}")]
    PartitionAborted {
        stage: usize,
        #[source]
        source: Box<Error>,
        partial: Box<PartitionResult>,
    },
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. } | Error::Io { .. } => ErrorCategory::Parse,
            Error::DimensionMismatch { .. }
            | Error::EmptyPointSet
            | Error::Precondition(_)
            | Error::InvalidVariety(_)
            | Error::CapacityTooSmall { .. }
            | Error::OracleScopeExceeded(_) => ErrorCategory::Precond,
            Error::SearchExhausted { .. } | Error::NoCutFound => ErrorCategory::Search,
            Error::PartitionAborted { source, .. } => source.category(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
