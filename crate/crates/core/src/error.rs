use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate state: norm is zero or not finite")]
    DegenerateState,

    #[error("size mismatch: expected {expected} sites, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("amplitude vector of length {len} does not describe {sites} sites")]
    BadLength { sites: usize, len: usize },

    #[error("cut after site {cut} is out of range for a chain of {sites} sites")]
    CutOutOfRange { cut: usize, sites: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("taylor order exhausted at order {order}: residual {residual:e} above tolerance {tolerance:e}")]
    OrderExhausted {
        order: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid propagator configuration: {0}")]
    InvalidPropagator(String),

    #[error("beta = {0} is not on the checkpoint grid")]
    BetaNotOnGrid(f64),

    #[error("records do not share a common beta grid")]
    GridMismatch,

    #[error("empty record list")]
    EmptyRecords,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dense operation on {sites} sites exceeds the cap of {cap}")]
    DenseCapExceeded { sites: usize, cap: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("sample {sample_index} at L = {sites} failed: {source}")]
    Sample {
        sites: usize,
        sample_index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
