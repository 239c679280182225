use std::path::PathBuf;

use thiserror::Error;

/// Problems in a configuration file. Lines are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: unknown problem '{name}'")]
    UnknownProblem { line: usize, name: String },
    #[error("line {line}: bad value '{value}' for '{key}': {reason}")]
    BadValue { line: usize, key: String, value: String, reason: String },
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("line {line}: '{key}' given twice")]
    Duplicate { line: usize, key: String },
    #[error("no 'problem' key given")]
    MissingProblem,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] apflow::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} validation item(s) failed")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for configuration problems, 3 for everything that fails at run time.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
