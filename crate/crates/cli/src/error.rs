use std::fmt;
use std::path::PathBuf;

/// Pipeline step an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Theory,
    Prepare,
    Compile,
    Simulate,
    Reconstruct,
    Correlations,
    Bootstrap,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Theory => "theory",
            Stage::Prepare => "prepare",
            Stage::Compile => "compile",
            Stage::Simulate => "simulate",
            Stage::Reconstruct => "reconstruct",
            Stage::Correlations => "correlations",
            Stage::Bootstrap => "bootstrap",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("{stage} stage failed: {source}")]
    Pipeline {
        stage: Stage,
        #[source]
        source: unotsim::Error,
    },

    #[error("write stage failed for {path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl CliError {
    /// 2 for configuration and input errors, 3 for pipeline failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input { .. } => 2,
            CliError::Pipeline { .. } | CliError::Output { .. } => 3,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            CliError::Pipeline { stage, .. } => Some(*stage),
            CliError::Output { .. } => Some(Stage::Write),
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attach `stage` to a library error.
pub fn at<T>(stage: Stage, r: unotsim::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Pipeline { stage, source })
}
