//! File formats and subcommands of the `phid` tool.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod commands;
pub mod io;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] phid_core::Error),

    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    /// A check ran to completion and did not pass.
    #[error("{0}")]
    Rejected(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for bad or inconsistent data, 3 for numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}
