use std::fmt;

/// CLI failure, mapped onto a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration; the message starts with the offending field.
    Config(String),
    /// Reading the config file or writing output failed.
    Io(String),
    /// A simulation failed for a reason other than configuration.
    Run(fbmimo_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fbmimo_core::Error> for CliError {
    fn from(e: fbmimo_core::Error) -> Self {
        use fbmimo_core::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::Domain(_) | E::Capacity { .. } => CliError::Config(e.to_string()),
            other => CliError::Run(other),
        }
    }
}
