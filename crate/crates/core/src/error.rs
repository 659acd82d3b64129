use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),

    #[error("{size} points exceeds the exact assignment cap of {cap}; use emd_approx instead")]
    Capacity { size: usize, cap: usize },

    #[error("auction did not converge within {iterations} bidding iterations")]
    Convergence { iterations: u64 },

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    Divergence { epoch: usize, loss: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    ModelFormat(#[from] ModelFormatError),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Errors raised while reading point-cloud, latent, or manifest files.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("wrong magic bytes {found:?}, expected {expected:?}")]
    WrongMagic {
        found: Vec<u8>,
        expected: &'static [u8],
    },

    #[error("truncated input at byte offset {offset}: {message}")]
    Truncated { offset: usize, message: String },

    #[error("unexpected trailing data at byte offset {offset}")]
    TrailingData { offset: usize },

    #[error("malformed manifest: {0}")]
    Manifest(String),
}

/// Errors raised while loading a serialized model.
#[derive(Debug, thiserror::Error)]
pub enum ModelFormatError {
    #[error("not a model file: bad magic bytes {0:?}")]
    BadMagic(Vec<u8>),

    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("model file truncated at byte offset {offset}")]
    Truncated { offset: usize },

    #[error("model file shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("model file checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },

    #[error("invalid model config blob: {0}")]
    Config(String),

    #[error("unexpected {0} trailing bytes after checksum")]
    TrailingData(usize),
}
