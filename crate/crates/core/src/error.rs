use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input violated a precondition (non-finite value, correlation out of
    /// range, degenerate correlation matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its target accuracy. Carries the
    /// error estimate that was achieved before giving up.
    #[error("numeric error: {what} (achieved error estimate {achieved:.3e})")]
    Numeric { what: String, achieved: f64 },

    /// A request would exceed a hard resource bound (e.g. enumeration width).
    #[error("resource error: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
