use crate::stage::Stage;
use std::path::PathBuf;
use thiserror::Error;

pub const EXIT_PASS: i32 = 0;
/// Output could not be written.
pub const EXIT_IO: i32 = 1;
pub const EXIT_CHECKS: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("stage {stage} needs {needs}, which is not enabled")]
    Dependency { stage: Stage, needs: Stage },
    #[error("{0}")]
    Scenario(kdv_scatter::Error),
    #[error("{stage} stage: {source}")]
    Stage { stage: Stage, source: kdv_scatter::Error },
    #[error("missing artifact {}", .0.display())]
    Missing(PathBuf),
    #[error("{}: {msg}", path.display())]
    Malformed { path: PathBuf, msg: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Stage { source, .. } if source.is_numerical() => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
            _ => EXIT_INVALID,
        }
    }
}
