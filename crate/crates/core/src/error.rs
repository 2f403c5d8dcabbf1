use thiserror::Error;

/// Errors shared by every module of the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violated a precondition (negative scale, empty interval, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument was outside the supported range (table index, overflow, ...).
    #[error("range error: {0}")]
    Range(String),

    /// A numeric routine failed to reach its tolerance within its budget.
    #[error("did not converge: {0}")]
    NonConvergent(String),

    /// A certified inequality failed on the audited grid.
    #[error("audit failure: {0}")]
    AuditFailure(String),

    /// Structured input (family files, report documents) failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed input text.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
}
