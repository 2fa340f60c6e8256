use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must lie in {constraint}, got {value}")]
    ParameterOutOfRange {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("message index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },

    #[error("value {value:#x} does not fit in {bits} bits")]
    BitLengthMismatch { value: u64, bits: u32 },

    #[error("dimension {dim} exceeds the configured limit {limit}")]
    DimensionLimit { dim: u64, limit: u64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("row {row} has square norm {norm_sq}, expected 1")]
    RowNotNormalized { row: usize, norm_sq: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("measurement branch probability {probability:e} is too small to normalize")]
    DegenerateBranch { probability: f64 },

    #[error("scheme file {path}: {message}")]
    SchemeFormat { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
