use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument does not hold; the message names the bound.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request is well formed but outside what this crate implements.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Not enough usable data to produce an estimate (for example too few rows in a fit).
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// Return `Err(InvalidArgument)` with `msg` unless `cond` holds.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg()))
    }
}
