use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected input: bad flag or config value, invalid physical parameter.
    #[error("{0}")]
    Validation(String),
    /// Valid input that failed during computation.
    #[error("{0}")]
    Runtime(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Csv(#[from] csv::Error),
    #[error("output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn config(key: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("config: invalid value for `{key}`: {reason}"))
    }
}

impl From<rabi_aa::Error> for CliError {
    fn from(e: rabi_aa::Error) -> Self {
        use rabi_aa::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::ChannelMismatch { .. }
            | E::NegativeBase { .. }
            | E::EmptySearchSpace { .. }
            | E::TruncationRisk { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
