use std::io;

/// Errors produced by simulation components.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller supplied an argument outside the documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The problem instance itself is malformed (e.g. an absorbing-chain
    /// solve on a graph where trapped mass can never reach a sink).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
