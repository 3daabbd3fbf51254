use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate cell {cell} (measure {measure:e})")]
    DegenerateCell { cell: usize, measure: f64 },
    #[error("corrupt mesh structure: {0}")]
    Structure(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("quadrature exactness {requested} exceeds implemented maximum {max}")]
    QuadratureDegree { requested: usize, max: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("dense path limited to {limit} unknowns, got {size}")]
    TooLarge { size: usize, limit: usize },
    #[error("eigensolver: {0}")]
    Eigen(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
