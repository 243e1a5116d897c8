use thiserror::Error;

/// Exit code for bad flags, specs, config or input files.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for failures inside the numerics.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<colheat::Error> for CliError {
    fn from(e: colheat::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
