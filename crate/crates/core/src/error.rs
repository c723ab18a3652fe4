use thiserror::Error;

/// Failures raised by the step rules, schedules and run loop.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: usize },
    #[error("non-finite iterate at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },
    #[error("objective value {value:e} at iteration {iteration} tripped the divergence guard")]
    Diverged { iteration: usize, value: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Failures raised by the closed-form convergence analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("method {0} has no characteristic coefficients; alias it to NAG first")]
    UnsupportedMethod(&'static str),
    #[error(
        "root verdict (radius {radius}) disagrees with the coefficient conditions at alpha={alpha}, mu={mu}"
    )]
    InconsistentVerdict { alpha: f64, mu: f64, radius: f64 },
    #[error("singular trajectory system (determinant {0:e})")]
    Singular(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Failures raised while parsing IDX image containers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdxError {
    #[error("bad magic number {found:#010x} at offset 0 (expected 0x00000803)")]
    BadMagic { found: u32 },
    #[error("truncated IDX stream at offset {offset}: {detail}")]
    Truncated { offset: usize, detail: String },
    #[error("trailing bytes at offset {offset}: {extra} byte(s) after the image payload")]
    TrailingBytes { offset: usize, extra: usize },
}

/// Failures raised by the concrete objectives and the data helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("invalid architecture: {0}")]
    Architecture(String),
    #[error("non-finite loss")]
    NonFiniteLoss,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
