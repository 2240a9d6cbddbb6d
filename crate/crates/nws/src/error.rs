use std::io;
use std::path::PathBuf;

/// Failures of the file-level pipeline.
#[derive(Debug, thiserror::Error)]
pub enum NwsError {
    #[error("{}: file not found", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: read failed at byte {offset}: {source}", path.display())]
    ReadAt {
        path: PathBuf,
        offset: u64,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Core {
        path: PathBuf,
        #[source]
        source: nws_core::Error,
    },
    #[error(transparent)]
    Model(#[from] nws_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl NwsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        NwsError::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        NwsError::Format { path: path.into(), line, message: message.into() }
    }

    /// Process exit status: 3 for numerical aborts, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        let core = match self {
            NwsError::Core { source, .. } => Some(source),
            NwsError::Model(e) => Some(e),
            _ => None,
        };
        match core {
            Some(nws_core::Error::NonFiniteLoss { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = NwsError> = std::result::Result<T, E>;
