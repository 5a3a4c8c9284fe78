use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or configuration; exit code 2.
    #[error("{0}")]
    Usage(String),

    /// A checked inequality or tolerance failed; exit code 1.
    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Core(vfm_core::Error),

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(vfm_core::Error::Parameter(_)) => 2,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<vfm_core::Error> for CliError {
    fn from(e: vfm_core::Error) -> Self {
        match e {
            vfm_core::Error::Violation { .. } => CliError::Assertion(e.to_string()),
            other => CliError::Core(other),
        }
    }
}
