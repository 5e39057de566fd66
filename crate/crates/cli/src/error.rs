use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema error in {file}: {msg}")]
    Schema { file: String, msg: String },
    #[error("cannot access {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] cbifree::Error),
}

impl CliError {
    /// 1 for failures of a computation, 2 for bad input or invocation.
    pub fn exit_code(&self) -> u8 {
        use cbifree::Error as E;
        match self {
            CliError::Core(E::TruncationOverflow(_) | E::CapExceeded { .. } | E::NonUnit) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
