use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mode basis mismatch")]
    BasisMismatch,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("singular kernel: {0}")]
    Singular(&'static str),

    #[error("kernel is not {0}")]
    NotStructured(&'static str),

    #[error("quadratic form is not positive definite; the functional is not integrable")]
    NotIntegrable,

    #[error("invalid Bogoliubov pair: {0}")]
    InvalidPair(String),

    #[error("detector kernel must be a rank-1 projector with unit trace")]
    MultimodeDetector,

    #[error("heralding impossible: inverse normalization {0:e} is not positive")]
    HeraldImpossible(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid reduction: polynomial support leaves the subspace (residual {0:e})")]
    InvalidReduction(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("zero vector")]
    ZeroVector,

    #[error("numerical verification failed: {0}")]
    Verification(String),
}
