use thiserror::Error;

/// Errors raised by the imaging, watermarking and steganography pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FspiError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("length mismatch: expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid pattern parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("incomplete acquisition group at entry {0}")]
    IncompleteGroup(usize),

    #[error("size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("negative weight {weight} at entry {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("empty plan")]
    EmptyPlan,

    #[error("empty sequence")]
    EmptySequence,

    #[error("watermark information sum is zero")]
    ZeroWatermark,

    #[error("capacity exceeded: {requested} coefficients requested, {capacity} available")]
    CapacityExceeded { requested: usize, capacity: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, FspiError>;

pub(crate) fn dims(w: usize, h: usize) -> String {
    format!("{w}x{h}")
}
