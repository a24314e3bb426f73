use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the lattice, search and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (vertex outside
    /// the box, empty source set, malformed direction, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A box or enumeration exceeds what can be indexed or afforded.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Every replica of an estimate was discarded.
    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("invalid experiment spec: {}", format_issues(.0))]
    Validation(Vec<crate::harness::ValidationIssue>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn format_issues(issues: &[crate::harness::ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
