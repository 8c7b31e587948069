use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiracError {
    #[error("invalid exponent p = {p}; expected p >= 1 or infinity")]
    InvalidExponent { p: f64 },

    #[error("exponent p = {p} outside the admissible range {range}")]
    ExponentOutOfRange { p: f64, range: &'static str },

    #[error("grid needs at least {min} intervals, got {actual}")]
    GridTooSmall { min: usize, actual: usize },

    #[error("grid mismatch: {left} vs {right} intervals")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid weights b1 = {b1}, b2 = {b2}; expected b1 < 0 < b2")]
    InvalidWeights { b1: f64, b2: f64 },

    #[error("iteration limit {max_iter} reached in {stage}; last residual {residual:e}")]
    IterationLimit {
        stage: &'static str,
        max_iter: usize,
        residual: f64,
    },

    #[error("boundary conditions are not canonicalizable: J14 = 0")]
    NotCanonicalizable,

    #[error("boundary conditions are degenerate: rows of A are linearly dependent")]
    DependentRows,

    #[error("boundary conditions are not regular: J14*J32 = 0")]
    NonRegular,

    #[error("zero of the determinant too close to the contour: min |Δ| = {min_modulus:e}")]
    ContourTooClose { min_modulus: f64 },

    #[error("winding number {value} is not close to an integer")]
    NonIntegerWinding { value: f64 },

    #[error("zero search failed near λ = {re} + {im}i: {detail}")]
    ZeroSearch { re: f64, im: f64, detail: String },

    #[error("degenerate eigenvector pairing at index n = {n}")]
    DegeneratePairing { n: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, DiracError>;
