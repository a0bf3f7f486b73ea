use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: row {row}: {message}", path.display())]
    Csv { path: PathBuf, row: u64, message: String },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] dualtree_core::Error),
    /// An invariant or oracle check failed.
    #[error("{0}")]
    Contract(String),
}

impl CliError {
    /// 1 for usage and input/output problems, 2 for violated contracts.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Csv { .. } | CliError::Format { .. } => 1,
            CliError::Core(_) | CliError::Contract(_) => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
