use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported mesh geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("missing parameters for MZI {index} (layer {layer}, modes {a}-{b})")]
    IncompleteParameters {
        index: usize,
        layer: usize,
        a: usize,
        b: usize,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("basis mismatch: {0}")]
    Basis(String),

    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("target has zero variance over the evaluation window")]
    DegenerateTarget,

    #[error("series diverged at step {step} (|y| = {value})")]
    Instability { step: usize, value: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
