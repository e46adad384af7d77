use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field error: {0}")]
    Field(String),
    #[error("flavor mismatch: {0}")]
    Flavor(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("unknown name '{0}'")]
    UnknownName(String),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid coalgebra: {0}")]
    Coalgebra(String),
    #[error("invalid base algebra: {0}")]
    Base(String),
    #[error("missing value: {0}")]
    Missing(String),
    #[error("{0}")]
    Format(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
