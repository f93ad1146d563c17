use std::path::PathBuf;

use smallball_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid config field `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("unknown experiment `{0}` (see `smallball list`)")]
    UnknownExperiment(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Numeric(CoreError),
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::Validation { field: field.into(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for bad configs, 3 for budget overruns, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Validation { .. } | LabError::UnknownExperiment(_) => 2,
            LabError::Budget(_) => 3,
            _ => 1,
        }
    }

    /// Maps a numerical error raised while handling the `params` block.
    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::Invalid { field, reason } => LabError::validation(format!("params.{field}"), reason),
            CoreError::Regularity(r) => LabError::validation("params", r),
            CoreError::OutOfRange(r) => LabError::validation("params", r),
            CoreError::Budget(r) => LabError::Budget(r),
            e @ CoreError::TooFewPoints { .. } => LabError::Numeric(e),
        }
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        LabError::from_core(e)
    }
}
