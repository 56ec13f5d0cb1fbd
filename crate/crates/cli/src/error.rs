use mqs_core::bath::BathError;
use thiserror::Error;

/// Failure classes, each with its own process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Prefixes the message with the step that failed.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<mqs_core::io::IoError> for CliError {
    fn from(e: mqs_core::io::IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<mqs_core::Error> for CliError {
    fn from(e: mqs_core::Error) -> Self {
        match e {
            // parameter validation happens before any computation
            mqs_core::Error::Bath(b @ BathError::InvalidSpec { .. })
            | mqs_core::Error::Bath(b @ BathError::OverCoupling { .. }) => {
                CliError::Config(b.to_string())
            }
            mqs_core::Error::Io(io) => io.into(),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

macro_rules! numeric_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                mqs_core::Error::from(e).into()
            }
        }
    )*};
}

numeric_from!(
    BathError,
    mqs_core::modes::ModesError,
    mqs_core::potentials::PotentialsError,
    mqs_core::dynamics::DynamicsError,
    mqs_core::analysis::FitError
);
