use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code spec: {0}")]
    InvalidSpec(String),

    #[error("input sequence is empty")]
    EmptyInput,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("tag length {0} bits is outside [8, 256]")]
    TagLengthOutOfRange(usize),

    #[error("key must be at least 16 bytes, got {0}")]
    KeyTooShort(usize),

    #[error("flip budget {0} exceeds the maximum of 24")]
    FlipBudgetTooLarge(u32),

    #[error("attempt {attempt} is outside the counter range of a {budget}-bit flip budget")]
    AttemptOutOfRange { attempt: u64, budget: u32 },

    #[error("sequence lengths do not match the frame geometry: {0}")]
    GeometryMismatch(String),

    #[error("invalid frame geometry: {0}")]
    GeometryViolation(String),

    #[error("target BER {0:e} is not bracketed by the curve")]
    TargetNotBracketed(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
