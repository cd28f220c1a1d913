use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("file not found: {0}")]
    MissingFile(PathBuf),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema violation in {context}: {message}")]
    Schema { context: String, message: String },

    #[error("records reference uncategorized domains: {0:?}")]
    UncategorizedDomains(Vec<String>),

    #[error("sampling needs {needed} safe records but only {available} are available")]
    InsufficientSafe { needed: usize, available: usize },

    #[error("EMB1 header error: {0}")]
    EmbHeader(String),

    #[error("EMB1 payload truncated: expected {expected} bytes, found {found}")]
    EmbTruncated { expected: usize, found: usize },

    #[error("non-finite value in embedding row {row} (id {id:016x})")]
    EmbNonFinite { row: usize, id: u64 },

    #[error("duplicate embedding id {0:016x}")]
    EmbDuplicateId(u64),

    #[error("labeled id {0} missing from embedding matrix")]
    MissingEmbedding(String),

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("class {class} has {count} members, fewer than k = {k}")]
    ClassTooSmall { class: u8, count: usize, k: usize },

    #[error("dimension mismatch: model expects {expected}, input has {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("non-finite loss at epoch {0}")]
    NonFiniteLoss(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("duplicate prediction for id {id} from model {model}")]
    DuplicateVote { id: String, model: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::MissingFile(_) => "missing_file",
            Error::Config(_) | Error::UncategorizedDomains(_) => "config",
            Error::Schema { .. }
            | Error::Json(_)
            | Error::Csv(_)
            | Error::EmbHeader(_)
            | Error::EmbTruncated { .. }
            | Error::EmbNonFinite { .. }
            | Error::EmbDuplicateId(_) => "schema",
            _ => "data",
        }
    }

    /// Process exit code for the command-line tool; 2 is left to usage errors.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "missing_file" => 3,
            "schema" => 4,
            "config" => 5,
            "data" => 6,
            _ => 7,
        }
    }
}
