//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("unknown segment `{0}`")]
    UnknownSegment(String),

    #[error("unknown plugin `{0}`")]
    UnknownPlugin(String),

    #[error("{what}: expected {expected}, got {actual}")]
    ShapeMismatch {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("{what} {index} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("parameter `{name}`: {message}")]
    Parameter { name: String, message: String },

    #[error("{0}")]
    Capability(String),

    #[error("domain violation at sample {index}: {message}")]
    Domain { index: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("empty data: {0}")]
    EmptyData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
