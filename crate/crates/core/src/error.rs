use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty relation")]
    EmptyRelation,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate tuple id `{0}`")]
    DuplicateId(String),
    #[error("unknown tuple id `{0}`")]
    UnknownId(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("attribute `{0}` is constant and cannot be normalized")]
    ZeroScale(String),
    #[error("invalid weight predicate at line {line}: {message}")]
    Predicate { line: usize, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lp(#[from] rankfit_lp::LpError),
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CoreError {
    CoreError::Invalid(msg.into())
}
