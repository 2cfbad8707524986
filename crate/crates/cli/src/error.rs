use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gaussep::Error),
    #[error("unphysical matrix: {0}")]
    Unphysical(String),
    #[error("check failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use gaussep::Error as E;
        match self {
            CliError::Io { .. } | CliError::Config(_) => 2,
            CliError::Unphysical(_) => 3,
            CliError::Assertion(_) => 4,
            CliError::Core(e) => match e {
                E::NotPositiveDefinite { .. }
                | E::PairingFailure
                | E::UnphysicalSpec(_)
                | E::DegenerateSpectrum(_) => 3,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
