use crate::image::Rect;
use thiserror::Error;

/// Errors produced by the library.
///
/// PGM decode failures are split into separate variants so callers can tell
/// a bad header from truncated pixel data; model and cascade loaders report
/// the offending line or element path.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pgm: missing or unsupported magic (expected \"P5\")")]
    PgmMagic,
    #[error("pgm: malformed header: {0}")]
    PgmHeader(String),
    #[error("pgm: maxval {0} out of range (must be 1..=255)")]
    PgmMaxval(u32),
    #[error("pgm: truncated pixel data (expected {expected} bytes, found {found})")]
    PgmTruncated { expected: usize, found: usize },

    #[error("rect {rect:?} out of bounds for {width}x{height} image")]
    RectOutOfBounds { rect: Rect, width: u32, height: u32 },
    #[error("zero-area rect")]
    EmptyRect,

    #[error("{context}: expected length {expected}, got {got}")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("model file line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },

    #[error("cascade: not valid JSON: {0}")]
    CascadeJson(#[from] serde_json::Error),
    #[error("cascade: {path}: {msg}")]
    CascadeSchema { path: String, msg: String },

    #[error("dataset: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
