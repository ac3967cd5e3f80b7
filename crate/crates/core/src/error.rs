use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a LEDF file")]
    NotLedf,

    #[error("unsupported LEDF version {0}")]
    UnsupportedVersion(u32),

    #[error("unexpected end of dump at byte {offset}")]
    Truncated { offset: u64 },

    #[error("metadata count mismatch: header declares {declared} items, metadata holds {found}")]
    MetadataCountMismatch { declared: u64, found: usize },

    #[error("invalid dump metadata: {0}")]
    InvalidMetadata(String),

    #[error("non-finite value at layer {layer}, item {item}, column {column}")]
    NonFinite {
        layer: usize,
        item: usize,
        column: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("zero vector: {0}")]
    ZeroVector(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{task}: expected {expected} pairs, found {found}")]
    PairCount {
        task: String,
        expected: usize,
        found: usize,
    },

    #[error("{kind} missing from embeddings ({} total): {}", missing.len(), preview(missing))]
    Missing { kind: String, missing: Vec<String> },

    #[error("config: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error beneath any [`Error::Context`] layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

fn preview(items: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut s = items
        .iter()
        .take(SHOWN)
        .map(|w| format!("{w:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    if items.len() > SHOWN {
        s.push_str(", ...");
    }
    s
}
