use thiserror::Error;

pub type Result<T> = std::result::Result<T, PhaseError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("argument {0} outside the supported domain")]
    Domain(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("nonzero entry outside bandwidth {bandwidth} at ({row}, {col})")]
    BandViolation {
        bandwidth: usize,
        row: usize,
        col: usize,
    },

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PhaseError {
    fn from(e: std::io::Error) -> Self {
        PhaseError::Io(e.to_string())
    }
}
