use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or references that do not line up: mismatched grounds, bad
    /// dimensions, out-of-range indices.
    #[error("structural error: {0}")]
    Structural(String),

    /// Inputs outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("budget exceeded: {what} needs more than {limit} {unit}{hint}")]
    Budget {
        what: String,
        limit: u64,
        unit: &'static str,
        hint: String,
    },

    #[error("certificate error in class {class}: {reason}")]
    Certificate { class: usize, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
