use std::io;
use std::path::PathBuf;

use latentcloud_core::Error as CoreError;
use latentcloud_service::ServiceError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Service(#[from] ServiceError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("cannot write loss log {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => core_code(e),
            CliError::Service(ServiceError::Core(e)) => core_code(e),
            CliError::Service(_) => 4,
            CliError::Io { .. } | CliError::Csv { .. } => 4,
        }
    }
}

fn core_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Dimension(_)
        | CoreError::Config(_)
        | CoreError::OutOfRange(_)
        | CoreError::DegenerateWeights(_)
        | CoreError::Parse(_) => 2,
        CoreError::Capacity { .. }
        | CoreError::Convergence { .. }
        | CoreError::Divergence { .. } => 3,
        CoreError::ModelFormat(_) | CoreError::Io { .. } => 4,
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
