use std::io;

use thiserror::Error;

use crate::encoding::FieldRole;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("unsupported suite: {0}")]
    UnsupportedSuite(String),

    #[error("invalid field count {0} (permitted range 1..=64)")]
    InvalidFieldCount(usize),

    #[error("field role list has {got} entries, expected {expected}")]
    RoleCountMismatch { expected: usize, got: usize },

    #[error("duplicate field role: {0}")]
    DuplicateRole(FieldRole),

    #[error("invalid params encoding: {0}")]
    InvalidParams(String),

    #[error("entropy unavailable: {0}")]
    EntropyUnavailable(String),

    #[error("invalid seed length {0} (expected 32 bytes)")]
    InvalidSeed(usize),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("malformed evidence item: {0}")]
    MalformedItem(String),

    #[error("component {component} is {len} long, limit is {max}")]
    OversizeComponent {
        component: &'static str,
        len: usize,
        max: usize,
    },

    #[error("component {component} must not be empty")]
    EmptyComponent { component: &'static str },

    #[error("digest {component} has width {len} bytes, expected 32")]
    InvalidDigestWidth { component: String, len: usize },

    #[error("duplicate extension tag {0:?}")]
    DuplicateExtensionTag(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: u64, len: u64 },

    #[error("cannot decode {what}: {reason}")]
    Decode { what: &'static str, reason: String },

    #[error("signing failed: {0}")]
    Signing(String),

    #[error("empty sequence")]
    EmptySequence,

    #[error("chain length overflow")]
    LengthOverflow,

    #[error("anchor sink unavailable: {0}")]
    SinkUnavailable(String),

    #[error("sequence conflict at {sequence}: sink holds {existing}, refusing {attempted}")]
    SequenceConflict {
        sequence: u64,
        existing: crate::Digest,
        attempted: crate::Digest,
    },

    #[error("sequence gap: next sequence is {expected}, got {got}")]
    SequenceGap { expected: u64, got: u64 },

    #[error("params mismatch: log is bound to {expected}, evidence to {got}")]
    ParamsMismatch {
        expected: crate::Digest,
        got: crate::Digest,
    },

    #[error("corrupt record at index {0} (partial trailing record)")]
    CorruptRecord(u64),

    #[error("corrupt file {path}: {reason}")]
    CorruptFile { path: String, reason: String },

    #[error("event store lacks the event for record {0}")]
    MissingEvent(u64),

    #[error("storage failure: {0}")]
    Storage(#[from] io::Error),
}

impl Error {
    pub(crate) fn decode(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Decode {
            what,
            reason: reason.into(),
        }
    }
}
