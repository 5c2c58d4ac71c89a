use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or checking a dilation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("kernel is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    InvalidKernel { min_eigenvalue: f64 },

    #[error("point map does not preserve the kernel (max deviation {residual:e})")]
    MorphismViolation { residual: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("sample vector {index} escapes the sample set under the unitary")]
    NotClosed { index: usize, image: Vec<num_complex::Complex64> },

    #[error("sample vector {index} matches {candidates} points within tolerance")]
    AmbiguousMatch { index: usize, candidates: usize },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("map is not unital (residual {residual:e})")]
    NotUnital { residual: f64 },

    #[error("dilation pair {which} is not minimal (span rank {rank}, space dimension {dim})")]
    NotMinimal { which: usize, rank: usize, dim: usize },

    #[error("pairs compress to different maps (max residual {residual:e})")]
    CompressionMismatch { residual: f64 },

    #[error("generators are rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("element is outside the operator system: {0}")]
    NotInSystem(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("operator is not a contraction (norm {norm})")]
    NotContraction { norm: f64 },

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("grid of {grid} points is too coarse for degree {degree} (need at least {required})")]
    GridTooCoarse { grid: usize, degree: usize, required: usize },

    #[error("denominator is singular at the operator (condition number {condition:e})")]
    SingularDenominator { condition: f64 },

    #[error("pole collides with boundary sample {index}")]
    PoleOnSample { index: usize },

    #[error("tuple does not commute: generators {i} and {j} (commutator norm {residual:e})")]
    NotCommuting { i: usize, j: usize, residual: f64 },

    #[error("tower of dimension {required} exceeds the size cap {cap}")]
    SizeCapExceeded { required: usize, cap: usize },

    #[error("construction failed its own check: {what} (residual {residual:e})")]
    ConstructionCheck { what: &'static str, residual: f64 },
}
