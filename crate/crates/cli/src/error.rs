use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error(transparent)]
    Numeric(#[from] fracvolterra::Error),
}

impl CliError {
    /// Process exit code: 1 failed check or unmet hypothesis, 2 configuration,
    /// 3 divergence, 4 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Hypothesis(_) | CliError::Numeric(fracvolterra::Error::Hypothesis(_)) => 1,
            CliError::Numeric(fracvolterra::Error::Divergence { .. }) => 3,
            CliError::Io { .. } | CliError::Numeric(_) => 4,
        }
    }
}
