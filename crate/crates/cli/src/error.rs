use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical failure: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl From<genzernike::Error> for CliError {
    fn from(e: genzernike::Error) -> Self {
        let msg = e.to_string();
        if e.is_numerical() {
            CliError::Numerical(msg)
        } else if matches!(e, genzernike::Error::Io(_)) {
            CliError::Io(msg)
        } else {
            CliError::Config(msg)
        }
    }
}
