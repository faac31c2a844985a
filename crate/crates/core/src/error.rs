use thiserror::Error;

/// Errors raised by fracvar operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("fractional order {0} is outside the open interval (0, 1)")]
    InvalidOrder(f64),

    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sampled values have length {got}, grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("functions are sampled on different grids")]
    GridMismatch,

    #[error("boundary metadata {value} does not match sample {sample} at t = {t}")]
    BoundaryMismatch { t: f64, value: f64, sample: f64 },

    #[error("{0} is not a node of the grid")]
    NotOnGrid(f64),

    #[error("invalid subinterval: {0}")]
    InvalidSubInterval(String),

    #[error("node index {index} out of range 0..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("transformed time is not strictly increasing near t = {0}")]
    NonMonotoneTransform(f64),

    #[error("lower bound moved from {a} to {moved} under a fixed-bound policy")]
    BoundMoved { a: f64, moved: f64 },

    #[error("truncation level {requested} exceeds the available derivative order {available}")]
    TruncationTooHigh { requested: usize, available: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular linear system")]
    SingularSystem,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = FracError> = std::result::Result<T, E>;
