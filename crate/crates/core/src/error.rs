use thiserror::Error;

/// Errors raised by the library. CLI exit codes are derived from the variant.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("minor order {order} out of range for {m}x{n}")]
    OrderOutOfRange { order: usize, m: usize, n: usize },
    #[error("scale factor must be non-zero")]
    ZeroScale,
    #[error("basis matrices are linearly dependent: {0}")]
    DependentBasis(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("chart is not transversal: {0}")]
    NonTransversal(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
