use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (max |M - M^†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max |U^†U - I| = {residual:e})")]
    NonUnitary { residual: f64 },

    #[error("trace {trace} deviates from {expected}")]
    TraceMismatch { trace: f64, expected: f64 },

    #[error("eigenvalue {value:e} is negative beyond tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("probability {value:e} at index {index} is negative")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {total}, exceeding {limit}")]
    ProbabilityMassExceeded { total: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid channel statistics: {0}")]
    InvalidStatistics(String),

    /// `p000` is zero: the key-rate bound is undefined and the parties abort.
    #[error("too much noise: p000 = {p000} (must be positive)")]
    TooMuchNoise { p000: f64 },

    #[error("insufficient data: no samples in class '{class}'")]
    InsufficientData { class: String },

    #[error("raw key is empty")]
    EmptyKey,

    #[error("stats file line {line}: {message}")]
    StatsFileSyntax { line: usize, message: String },

    #[error("stats file is missing key '{key}'")]
    StatsFileMissingKey { key: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
