use thiserror::Error;

/// Errors produced by sequence construction, polynomial algebra, and simulation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pair (or a train's pairing) failed the complementary-correlation check.
    #[error("invalid Golay pair: {0}")]
    InvalidPair(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_argument(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn dimension_mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
