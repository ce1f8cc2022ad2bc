use std::fmt;
use std::path::Path;

/// Driver failure, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Config or input file does not parse or validate (exit 2).
    Schema(String),
    /// Referenced file is missing or unreadable (exit 2).
    Input(String),
    /// Numerical failure while running a task (exit 3).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn input(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "invalid input: {m}"),
            CliError::Input(m) => write!(f, "cannot access file: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ppoints_core::Error> for CliError {
    fn from(e: ppoints_core::Error) -> Self {
        use ppoints_core::Error as E;
        match e {
            E::Config(_) | E::Usage(_) | E::Shape(_) => CliError::Schema(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}
