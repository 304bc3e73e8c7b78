use thiserror::Error;

/// Errors raised by the landscape library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("problem size {n} is below the minimum of 3")]
    SizeTooSmall { n: usize },

    #[error("not a bijection: {0}")]
    NotBijection(String),

    #[error("dimension mismatch: expected size {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("swap requires two distinct positions, got {0} twice")]
    SameIndex(usize),

    #[error("omega functions require i != j and p != q, got ({i},{j}),({p},{q})")]
    DegenerateOmega { i: usize, j: usize, p: usize, q: usize },

    #[error("dense four-index tensor limited to n <= {max}, got {n}")]
    TensorTooLarge { n: usize, max: usize },

    #[error("matrix has {found} entries, expected {expected}")]
    MatrixShape { expected: usize, found: usize },

    #[error("exhaustive enumeration of size {n} exceeds the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("fitness has zero variance")]
    ZeroVariance,

    #[error("random walk needs at least one step")]
    ZeroSteps,

    #[error("max lag {max_lag} too large for a series of {steps} steps (need max_lag < steps/10)")]
    LagTooLarge { max_lag: usize, steps: usize },

    #[error("invalid value range [{lo}, {hi}]")]
    InvalidBounds { lo: i64, hi: i64 },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("value {0} cannot be written as a finite decimal")]
    NonTerminating(String),

    #[error("component index must be 1, 2 or 3, got {0}")]
    BadComponent(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
