use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("invalid group dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("pixel value {value} out of range for alphabet size {alphabet}")]
    PixelOutOfRange { value: usize, alphabet: usize },

    #[error("invalid probability parameter {name} = {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("not a pmf: {0}")]
    NotAPmf(String),

    #[error("channel is not row-stochastic: {0}")]
    NotStochastic(String),

    #[error("alphabet size mismatch: {0}")]
    SizeMismatch(String),

    #[error("size guard violated: {0}")]
    GuardViolation(String),

    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(String),

    #[error("empty histogram")]
    EmptyHistogram,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("minimizers are pairwise incomparable: no finest partition among {count} minimizers")]
    NoFinestMinimizer { count: usize },

    #[error("candidate partitions are incomparable: no densest candidate")]
    NoDensestCandidate,

    #[error("likelihood is zero for every candidate")]
    ZeroLikelihood,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
