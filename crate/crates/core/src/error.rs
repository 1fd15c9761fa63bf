use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, state, potential or scenario parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was handed a value in the wrong representation or state.
    #[error("contract violation: {0}")]
    Contract(String),

    /// NaN/Inf amplitudes, negative variances and similar breakdowns.
    #[error("numerical integrity error{}: {msg}", .t.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Numerical { t: Option<f64>, msg: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {}: {msg}", .path.display())]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical {
            t: None,
            msg: msg.into(),
        }
    }

    /// Attaches a simulation time to a numerical-integrity error.
    pub(crate) fn at_time(self, t: f64) -> Self {
        match self {
            Error::Numerical { msg, .. } => Error::Numerical { t: Some(t), msg },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
