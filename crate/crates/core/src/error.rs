use std::path::PathBuf;

use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("unknown {kind} `{id}`")]
    UnknownEntity { kind: &'static str, id: String },

    #[error("weight {weight} for ({artist}, {feature}) outside [0, 1]")]
    InvalidWeight { artist: String, feature: String, weight: f64 },

    #[error("at least one genre tag or popular artist preference is required")]
    EmptyPreferences,

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("{path}:{line}: {message}")]
    MalformedInput { path: PathBuf, line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn unknown(kind: &'static str, id: impl ToString) -> Self {
        Error::UnknownEntity { kind, id: id.to_string() }
    }
}
