use bffkit::BffError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid quadrature spec: {0}")]
    Spec(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("series truncation failed after {terms} terms")]
    Truncation { terms: u64 },

    #[error("outside support: {0}")]
    Support(String),

    #[error(transparent)]
    Core(#[from] BffError),
}

pub type Result<T> = std::result::Result<T, OracleError>;
