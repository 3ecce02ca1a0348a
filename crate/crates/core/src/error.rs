use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty spectrum: cutoff {cutoff} Hz does not exceed fundamental {fundamental} Hz")]
    EmptySpectrum { fundamental: f64, cutoff: f64 },

    #[error("requested {requested} edges but only {available} pairs have nonzero weight (short by {})", requested - available)]
    NotEnoughEdges { requested: usize, available: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
