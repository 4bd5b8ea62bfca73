use thiserror::Error;

/// Crate-wide error type.
///
/// The variants are grouped by recovery class: `Parse` and `Alignment` mean
/// the input data is malformed, `Config` means the caller asked for something
/// inconsistent, `Model` means shapes or lookups inside the scorer failed,
/// and `Io` wraps filesystem failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {doc} at line {line}: {msg}")]
    Parse { doc: String, line: usize, msg: String },

    #[error("alignment error in {doc}: {msg}")]
    Alignment { doc: String, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(doc: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { doc: doc.into(), line, msg: msg.into() }
    }

    pub fn alignment(doc: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Alignment { doc: doc.into(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
