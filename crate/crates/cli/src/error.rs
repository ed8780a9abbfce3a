use std::fmt;

use gadtparam_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_TYPE: u8 = 3;
pub const EXIT_CAPS: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: String, source: std::io::Error },
    Core(Error),
    /// An error in the contents of an input file.
    InFile { path: String, error: Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Core(e) | CliError::InFile { error: e, .. } => match e {
                Error::Parse(_) => EXIT_USAGE,
                Error::Kind { .. } | Error::Type(_) | Error::Unsupported(_) => EXIT_TYPE,
                Error::Caps(_) => EXIT_CAPS,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::InFile { path, error: e @ Error::Parse(_) } => write!(f, "{path}:{e}"),
            CliError::InFile { path, error } => write!(f, "{path}: {error}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
