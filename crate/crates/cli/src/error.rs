use std::path::PathBuf;

use thiserror::Error;
use tqw_core::lattice::WrapWarning;
use tqw_core::TqwError;

use crate::validate::Diagnostic;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed config: {0}")]
    Schema(String),
    #[error("config rejected:\n{}", list(.0))]
    Rejected(Vec<Diagnostic>),
    #[error(transparent)]
    Physics(#[from] TqwError),
    #[error("{0} (strict mode)")]
    Wrap(WrapWarning),
    #[error("warnings escalated in strict mode:\n{}", list(.0))]
    Strict(Vec<Diagnostic>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn list(d: &[Diagnostic]) -> String {
    d.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for a malformed config, 3 for anything the physics layer refuses,
    /// 1 for I/O trouble.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Rejected(d) if d.iter().any(Diagnostic::is_schema) => 2,
            CliError::Rejected(_) | CliError::Physics(_) | CliError::Wrap(_) | CliError::Strict(_) => 3,
            CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }
}
