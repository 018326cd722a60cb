use std::fmt;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("direction outside the domain of {algorithm} at step {step}: {reason}")]
    Domain {
        algorithm: String,
        step: usize,
        reason: String,
    },
    #[error("interval comparison undecided at step {step} ({context})")]
    Inconclusive { step: usize, context: String },
    #[error("index range {start}..{end} exceeds materialized length {len}")]
    Range { start: usize, end: usize, len: usize },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("no growing periodic point through letter {0}")]
    NotGrowing(u8),
    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl fmt::Display) -> Self {
        Error::Input(msg.to_string())
    }
}
