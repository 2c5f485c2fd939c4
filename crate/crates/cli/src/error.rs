use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameter values. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, malformed or unsuitable data, or an output that cannot be written. Exit code 2.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn data(context: &str, e: genfreq::Error) -> Self {
        CliError::Data(format!("{context}: {e}"))
    }
}

impl From<genfreq::Error> for CliError {
    fn from(e: genfreq::Error) -> Self {
        match e {
            genfreq::Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}
