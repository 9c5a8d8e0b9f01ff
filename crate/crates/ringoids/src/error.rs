use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgError {
    #[error("group order {order} exceeds the configured limit {limit}")]
    OrderLimit { order: u128, limit: u64 },
    #[error("presentation defines an infinite group")]
    Infinite,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("index category is not a poset")]
    NotPoset,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, AlgError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(AlgError::Invalid(msg.into()))
}
