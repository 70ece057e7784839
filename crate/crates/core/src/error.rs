use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Lexing failed; `offset` is the byte offset of the offending construct.
    #[error("lex error at byte {offset}: {message}")]
    Lex { offset: usize, message: String },

    /// A structural expectation about a method record was violated
    /// (e.g. the declaration-site name token was not found).
    #[error("structural error in record `{id}`: {message}")]
    Structural { id: String, message: String },

    /// Not enough positives or negatives to assemble a dataset.
    #[error(
        "insufficient {class} examples for target `{target}` in {split}: {available} < {required}"
    )]
    Shortfall {
        target: String,
        class: String,
        split: String,
        available: usize,
        required: usize,
    },

    /// Bad user-supplied configuration or arguments.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A pipeline stage was requested before its prerequisite ran.
    #[error("{stage}: {needed} must run first")]
    MissingStage { stage: String, needed: String },

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),

    /// Vector/matrix dimension mismatch.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Training was handed a single-class dataset.
    #[error("training data contains a single class")]
    SingleClass,

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(path: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// Process exit code the CLI maps this error to: 1 for validation
    /// errors, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::MissingStage { .. } | Error::Dimension(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
