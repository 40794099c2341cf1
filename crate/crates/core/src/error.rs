use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text. Line numbers are 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Gold and predicted corpora disagree on sentence or token layout.
    #[error("alignment mismatch at sentence {sentence}, token {token}: {message}")]
    Alignment {
        sentence: usize,
        token: usize,
        message: String,
    },

    /// An operation that needs a VALID IOB sequence received an invalid one.
    #[error("sentence {sentence} has an invalid label at token {token}; repair labels first")]
    InvalidSentence { sentence: usize, token: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("corpus '{corpus}' has {available} sentences but {needed} are required")]
    Size {
        corpus: String,
        needed: usize,
        available: usize,
    },

    #[error("lookup failed: {0}")]
    Lookup(String),

    /// The metric grid lacks the columns an operation needs.
    #[error("missing capability: {0}")]
    Capability(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
