use thiserror::Error;

use crate::channel::ChannelId;

/// Errors produced anywhere in the extraction, evaluation, or I/O paths.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported image format at byte offset {offset}: {reason}")]
    UnsupportedFormat { offset: usize, reason: String },

    #[error("corrupt image data at byte offset {offset}: {reason}")]
    CorruptData { offset: usize, reason: String },

    #[error("invalid composition spec: {0}")]
    InvalidSpec(String),

    #[error("report holds no colors to render")]
    EmptyReport,

    #[error("value {value} at index {index} is outside [0, 255]")]
    OutOfRange { index: usize, value: u16 },

    #[error("working set is empty")]
    EmptyWorkingSet,

    #[error("bin width must be positive")]
    NonPositiveRho,

    #[error("binning recursion depth {depth} exceeded limit {limit} (logic bug)")]
    RecursionLimitExceeded { depth: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("bin list is empty")]
    EmptyInput,

    #[error("too many colors to match: {len} (limit {limit})")]
    TooManyColors { len: usize, limit: usize },

    #[error("channel mismatch: estimated report is {estimated:?}, actual is {actual:?}")]
    ChannelMismatch {
        estimated: ChannelId,
        actual: ChannelId,
    },

    #[error("missing {0:?} channel in report set")]
    MissingChannel(ChannelId),

    #[error("k={k} clusters requested but only {distinct} are supportable")]
    KTooLarge { k: usize, distinct: usize },

    #[error("document schema mismatch: {0}")]
    SchemaMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
