use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// A problem with the run configuration, located in the source text
    /// when a file was involved.
    #[error("{origin}:{line}:{column}: {message}")]
    Config {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// A configuration problem without a source position (flags, presets).
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{component}: {source}")]
    Runtime {
        component: &'static str,
        #[source]
        source: abcpt::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps a library error, naming the part of the pipeline that failed.
    pub fn runtime(source: abcpt::Error) -> Self {
        use abcpt::Error as E;
        let component = match &source {
            E::RejectionCapExceeded { .. } => "rejection sampler",
            E::ZeroPriorAtCurrent { .. } | E::StateOutsideTolerance { .. } => "local move",
            E::DistanceOutsideRings(_) | E::InvalidExchangePair { .. } => "exchange phase",
            E::MaxEventsExceeded(_) | E::PopulationTooSmall { .. } => "tuberculosis simulator",
            E::NotPositiveDefinite(_) => "proposal kernel",
            E::InvalidSchedule(_) | E::InvalidRings(_) | E::InvalidConfig(_) => "configuration",
            E::TraceFormat(_) => "trace reader",
            E::InvalidArgument(_) | E::Undefined(_) => "diagnostics",
        };
        Self::Runtime { component, source }
    }

    /// Process exit status: 2 for configuration and usage problems, 1 for
    /// failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Invalid(_) | Self::Usage(_) => 2,
            Self::Runtime { .. } | Self::Io { .. } => 1,
        }
    }
}

impl From<abcpt::Error> for CliError {
    fn from(e: abcpt::Error) -> Self {
        Self::runtime(e)
    }
}
