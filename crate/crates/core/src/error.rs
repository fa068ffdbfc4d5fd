use thiserror::Error;

/// Errors produced by the codec, the channel model and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported code: {0}")]
    UnsupportedCode(String),
    #[error("expansion factor {0} is not a WiMAX subblock size")]
    BadZ(usize),
    #[error("malformed h_b column: {0}")]
    MalformedHb(String),
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("packed encoding needs Z divisible by the word size (Z = {z}, word = {word_bits} bits)")]
    UnsupportedZ { z: usize, word_bits: usize },
    #[error("LLR arithmetic does not match the decoder configuration")]
    ArithmeticMismatch,
    #[error("noise variance must be positive")]
    DivByZeroSigma,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
