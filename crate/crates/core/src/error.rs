use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    /// A request would exceed a configured memory or compute cap.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A regression was asked to fit fewer usable points than it needs.
    #[error("too few usable points: {usable} (need at least {needed})")]
    TooFewPoints { usable: usize, needed: usize },
    /// A numerical regularity or growth check failed on the horizon.
    #[error("regularity check failed: {0}")]
    Regularity(String),
    /// A request falls outside the range where results are resolved.
    #[error("out of resolved range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid<T>(field: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(Error::Invalid { field, reason: reason.into() })
}
