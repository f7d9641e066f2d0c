use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("invalid feed: {0}")]
    InvalidFeed(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division: {0}")]
    Inexact(String),
    #[error("expression is not subtraction-free")]
    Subtraction,
    #[error("singular matrix")]
    Singular,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("argument {0} is too close to a pole")]
    NearPole(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("reduction failed, residual: {0}")]
    Reduction(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, rank: usize) -> Result<()> {
    if index < rank {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, rank })
    }
}
