use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Config { path: PathBuf, line: usize, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: pairwalk::Error },

    #[error(transparent)]
    Core(#[from] pairwalk::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("fit did not converge after {iterations} iterations; best-so-far results written")]
    Unconverged { iterations: usize },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Process exit status: 2 parse/usage, 3 numerical, 4 unconverged, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        use pairwalk::Error as E;
        let core = |e: &E| match e {
            E::Parse { .. } | E::InvalidArgument(_) | E::GridMismatch(_) => 2,
            E::Io(_) => 1,
            _ => 3,
        };
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Input { source, .. } => core(source),
            CliError::Core(e) => core(e),
            CliError::Io { .. } => 1,
            CliError::Unconverged { .. } => 4,
        }
    }
}
