use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the admissible strip: |Im z| = {im} > {width}")]
    StripViolation { im: f64, width: f64 },
    #[error("convolved grid of {len} samples exceeds the cap of {max}")]
    GridOverflow { len: usize, max: usize },
    #[error("density grids differ in spacing ({0} vs {1})")]
    GridMismatch(f64, f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("multiplier symbol has no derivative evaluator")]
    MissingDerivative,
    #[error("K-functional solver diverged (iterate norm {norm} > bound {bound})")]
    SolverDiverged { norm: f64, bound: f64 },
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spectral parameter {0} too close to the spectrum")]
    NearSpectrum(String),
    #[error("measure decay {decay} cannot dominate group growth {growth}")]
    GrowthMismatch { decay: f64, growth: f64 },
    #[error("function has no decay order; Cauchy integral needs an elementary function")]
    NotElementary,
    #[error("strip ordering violated: need {group_type} < {contour} < {width}")]
    StripOrder { group_type: f64, contour: f64, width: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("grid half-length {have} too short, need at least {need}")]
    GridTooShort { have: f64, need: f64 },
    #[error("parameter order violated: {0}")]
    ParameterOrder(String),
    #[error("measure support exceeds [-{bound}, {bound}] (reaches {reach})")]
    SupportViolation { reach: f64, bound: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
