//! Command-line front end for `alp-core`: parsing, CSV and JSON output, and
//! the `edges`, `scan`, `midband`, `verify` and `catalog` commands.

pub mod args;
pub mod cli;
pub mod output;
pub mod verify;

/// Why a command stopped. Each kind has its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] alp_core::Error),
    /// Output was written but at least one modulus failed.
    #[error("{0}")]
    Partial(String),
    #[error("{0}")]
    Verification(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Numerical(_) | Failure::Partial(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}
