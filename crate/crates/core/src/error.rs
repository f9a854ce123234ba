use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is singular (or numerically singular)")]
    Singular,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular-value gap of index {index} too small: ratio {ratio} <= 1 + {tol}")]
    GapTooSmall { index: usize, ratio: f64, tol: f64 },

    #[error("word `{word}`: singular-value gap of index {index} too small: ratio {ratio} <= 1 + {tol}")]
    GapTooSmallAt { word: String, index: usize, ratio: f64, tol: f64 },

    #[error("matrix is not proximal: {which} eigenvalue ratio {ratio} <= 1 + {tol}")]
    NotProximal { which: &'static str, ratio: f64, tol: f64 },

    #[error("index {index} out of range [{lo}, {hi}]")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("unknown generator label `{0}`")]
    UnknownGenerator(String),

    #[error("ambiguous generator label `{0}` (declared in several factors)")]
    AmbiguousGenerator(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("validation failed ({clause}): {detail}")]
    Validation { clause: String, detail: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("not an exact rational: {0}")]
    NonRational(String),

    #[error("numeric overflow while evaluating `{0}`")]
    Overflow(String),

    #[error("eigenvalue computation failed to converge")]
    NoConvergence,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
