use thiserror::Error;

/// Errors raised by the numerical routines and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("curvature bound violated: K = {k} must satisfy K < 1/C = {limit}")]
    CurvatureBoundViolated { k: f64, limit: f64 },

    #[error("total mean curvature {measured} exceeds the declared bound K = {k}")]
    CurvatureExceedsBound { measured: f64, k: f64 },

    #[error("gamma function pole at argument {0}")]
    GammaPole(f64),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("operation requires a piecewise-linear profile")]
    InterpolationMismatch,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-manifold edge ({0}, {1})")]
    NonManifold(usize, usize),

    #[error("inconsistent orientation across edge ({0}, {1})")]
    Orientation(usize, usize),

    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),

    #[error("field is identically zero")]
    ZeroField,

    #[error("surface is not minimal: max |H| = {max_curvature} exceeds threshold {threshold}")]
    NotMinimal { max_curvature: f64, threshold: f64 },

    #[error("invalid inequality specification: {0}")]
    SpecInvalid(String),

    #[error("search ceiling {0} exceeded")]
    SearchCeiling(f64),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
