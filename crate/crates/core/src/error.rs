use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result would exceed the range of `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Two discrete objects do not live on the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A hypothesis required by a bound is violated by the supplied data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Picard iteration produced non-finite values.
    #[error("iteration diverged at sweep {iteration}: {detail}")]
    Divergence { iteration: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
