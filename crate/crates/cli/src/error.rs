use enclosure::Error;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration.
    Config(String),
    Core(Error),
    Io(std::io::Error),
    /// An oracle check ran but did not meet its tolerance.
    Check(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "CONFIG",
            CliError::Core(e) => e.code(),
            CliError::Io(_) => "IO",
            CliError::Check(_) => "ORACLE_CHECK",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Domain(_) | Error::Singularity(_) | Error::SourceOnCircle { .. } => 2,
                Error::Resolution(_) | Error::NearField(_) => 3,
                Error::Resonance { .. } | Error::Solver(_) => 4,
                Error::Fit(_) | Error::Reconstruction(_) => 5,
            },
            CliError::Check(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Check(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
