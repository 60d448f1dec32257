use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of a CLI operation, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or inconsistent configuration / instance spec.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] augdual_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    /// A data file exists but does not have the documented layout.
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, msg: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    /// 2 for configuration problems (including an inadmissible step size),
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(augdual_core::Error::StepSize { .. } | augdual_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
