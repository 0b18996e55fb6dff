use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("operands live on different sides (f-words vs e-words)")]
    SideMismatch,
    #[error("pivot submatrix is singular at multidegree {0}")]
    SingularPivot(String),
    #[error("module is not integrable: {witness} does not vanish")]
    NotIntegrable { witness: String },
    #[error("reconstruction failed for basis vector {vector}")]
    ReconstructionFailure { vector: usize },
    #[error("not finite dimensional: {0}")]
    NotFiniteDimensional(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
