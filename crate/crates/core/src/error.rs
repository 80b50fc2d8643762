use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("embedding dimension must be at least 1")]
    ZeroDimension,

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("at least 2 distinct concepts are required, found {found}")]
    SingleConcept { found: usize },

    #[error("at least 2 samples are required, found {found}")]
    TooFewSamples { found: usize },

    #[error("sample {index} has zero norm; cosine distance is undefined")]
    ZeroNormVector { index: usize },

    #[error("instance has {n} samples; the reference scan is limited to {limit}")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("every concept has an undefined skewness")]
    AllDegenerate,

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("bad magic {found:?}, expected \"KSE1\"")]
    BadMagic { found: [u8; 4] },

    #[error("truncated file: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("{} unexpected trailing bytes: expected {expected} bytes, found {actual}", actual - expected)]
    TrailingBytes { expected: u64, actual: u64 },

    #[error("label {label} at row {row} is out of range for {concepts} concepts")]
    LabelOutOfRange { row: usize, label: u32, concepts: u32 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: u64, column: usize, message: String },

    #[error("ragged rows: line {line} has {found} fields, expected {expected}")]
    RaggedRows { line: u64, expected: usize, found: usize },

    #[error("report schema mismatch in {path}: found {found:?}, expected {expected:?}")]
    SchemaMismatch { path: PathBuf, found: String, expected: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
