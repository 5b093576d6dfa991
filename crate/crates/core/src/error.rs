use thiserror::Error;

/// Errors raised by the model, solver and fitting layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller asked for something malformed (unknown unit, wrong sizes, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// An input file parsed but violates the format contract.
    #[error("format error{}: {message}", .electrode.as_ref().map(|e| format!(" in electrode '{e}'")).unwrap_or_default())]
    Format {
        electrode: Option<String>,
        message: String,
    },

    /// An iterative procedure gave up; `detail` carries the diagnostics.
    #[error("no convergence: {detail}")]
    NonConvergence { detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn format(electrode: Option<&str>, msg: impl Into<String>) -> Self {
        Error::Format {
            electrode: electrode.map(str::to_owned),
            message: msg.into(),
        }
    }

    /// Short machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Usage(_) => "usage",
            Error::Format { .. } => "format",
            Error::NonConvergence { .. } => "non-convergence",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
