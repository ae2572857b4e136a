use std::path::PathBuf;

use thiserror::Error;

use crate::codec::CodecId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{codec} encoder failed: {message}")]
    CodecFailure { codec: CodecId, message: String },

    #[error("{codec} stream is corrupt: {message}")]
    CorruptStream { codec: CodecId, message: String },

    #[error("not a container: bad magic {found:02x?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("invalid codec byte in header: first={first}, second={second}")]
    InvalidCodecByte { first: u8, second: u8 },

    #[error("reserved header byte must be zero, found {0}")]
    ReservedByte(u8),

    #[error("container truncated: {len} bytes, header needs {needed}")]
    Truncated { len: usize, needed: usize },

    #[error("integrity mismatch: expected {expected_len} bytes / crc {expected_crc:08x}, got {actual_len} bytes / crc {actual_crc:08x}")]
    IntegrityMismatch {
        expected_len: u64,
        expected_crc: u32,
        actual_len: u64,
        actual_crc: u32,
    },

    #[error("hybrid pipeline needs two distinct codecs, got {0} twice")]
    SelfPair(CodecId),

    #[error("unknown codec or pipeline name: {0:?}")]
    UnknownPipeline(String),

    #[error("round trip mismatch for {pipeline} (repetition {repetition})")]
    RoundTripMismatch { pipeline: String, repetition: usize },

    #[error("repetitions must be at least 1")]
    ZeroRepetitions,

    #[error("division by zero computing {0}")]
    DivisionDomain(&'static str),

    #[error("non-finite value at index {0}")]
    NonFiniteInput(usize),

    #[error("empty input to {0}")]
    EmptyInput(&'static str),

    #[error("normalized value {value} outside [0, 1]")]
    DomainError { value: f64 },

    #[error("invalid weights ({cr}, {cs}, {ds}): each must lie in [0, 1] and they must sum to 1")]
    InvalidWeights { cr: f64, cs: f64, ds: f64 },

    #[error("cohort mixes datasets {0:?} and {1:?}")]
    MixedCohort(String, String),

    #[error("ranking needs at least 2 rows, got {0}")]
    CohortTooSmall(usize),

    #[error("invalid UTF-8 in {path} at byte offset {offset}")]
    InvalidUtf8 { path: PathBuf, offset: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
