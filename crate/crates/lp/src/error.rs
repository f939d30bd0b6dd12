use thiserror::Error;

use crate::VarId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("variable {0:?} is not declared in this program")]
    UnknownVariable(VarId),
    #[error("variable {0:?} is not binary")]
    NotBinary(VarId),
    #[error("invalid bounds [{lower}, {upper}] for variable `{name}`")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("absolute-value term weight must be nonnegative, got {0}")]
    NegativeWeight(f64),
    #[error("big-M must be nonnegative and finite, got {0}")]
    InvalidBigM(f64),
    #[error("program contains binary variables; use solve_milp")]
    HasBinaries,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, LpError>;
