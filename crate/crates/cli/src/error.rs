use std::path::PathBuf;

use cdlab_core::Error as CoreError;
use thiserror::Error;

/// Process exit status. The numeric values are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    /// A certificate or structure check failed, or the lemma grid found a
    /// counterexample.
    CheckFailed = 1,
    Config = 2,
    InfeasibleSchedule = 3,
    BoundViolation = 4,
    Runtime = 5,
    MissingInput = 6,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("infeasible schedule: {0}")]
    Infeasible(String),

    #[error("bound violation: {0}")]
    BoundViolation(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("missing input: {}", .0.join(", "))]
    MissingInput(Vec<String>),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            Self::Config(_) => ExitStatus::Config,
            Self::Infeasible(_) => ExitStatus::InfeasibleSchedule,
            Self::BoundViolation(_) => ExitStatus::BoundViolation,
            Self::CheckFailed(_) => ExitStatus::CheckFailed,
            Self::MissingInput(_) => ExitStatus::MissingInput,
            Self::Io { .. } | Self::Runtime(_) => ExitStatus::Runtime,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch(_)
            | CoreError::InvalidModel(_)
            | CoreError::GrowthViolation { .. }
            | CoreError::PointOutsideDomain { .. }
            | CoreError::PrecisionExhausted { .. } => Self::Config(msg),
            CoreError::TruncationExhausted { .. } | CoreError::MissingLowerLayer { .. } => {
                Self::Infeasible(msg)
            }
            CoreError::BoundViolation { .. } | CoreError::NormBoundViolation { .. } => {
                Self::BoundViolation(msg)
            }
            CoreError::SpanningFailure { .. } => Self::CheckFailed(msg),
            CoreError::NonFinite(_) => Self::Runtime(msg),
        }
    }
}
