use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: residual {residual:e} exceeds {tolerance:e}")]
    NotSymmetric { residual: f64, tolerance: f64 },

    #[error("vectors are linearly dependent (vector {index} has residual norm {residual:e})")]
    RankDeficient { index: usize, residual: f64 },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("vector is not a unit vector: |norm - 1| = {deviation:e}")]
    NotUnit { deviation: f64 },

    #[error("{what} is not a Hermitian almost complex structure: {detail}")]
    NotComplexStructure { what: String, detail: String },

    #[error("{what} is not skew-symmetric (residual {residual:e})")]
    NotSkew { what: String, residual: f64 },

    #[error("matrix is not orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },

    #[error("frame is not orthonormal (Gram residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("dimension {dim} exceeds the dense materialization guard of {limit}")]
    DenseGuard { dim: usize, limit: usize },

    #[error("no Clifford family of rank {kappa} exists in dimension {n}: nu({n}) = {nu}")]
    CliffordObstruction { n: usize, kappa: usize, nu: usize },

    #[error("dimension {n} is not a multiple of the minimal representation dimension {block} for rank {kappa}; try n = {suggestion}")]
    NotMultiple {
        n: usize,
        kappa: usize,
        block: usize,
        suggestion: usize,
    },

    #[error("expected a family of rank {expected}, got rank {got}")]
    WrongRank { expected: usize, got: usize },

    #[error("coefficient c{index} must be nonzero")]
    ZeroCoefficient { index: usize },

    #[error("invalid dimension {n}: {reason}")]
    InvalidDimension { n: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}
