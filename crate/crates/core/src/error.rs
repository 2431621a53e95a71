use thiserror::Error;

/// Errors produced by every stage of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("unrecognized input format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("empty digit histogram: no values left to normalize")]
    EmptyHistogram,

    #[error("dataset carries no packet counts")]
    MissingPacketCounts,

    #[error("dataset is not labeled")]
    Unlabeled,

    #[error("degenerate labels: both classes are required")]
    DegenerateLabels,

    #[error("no valid window scores to summarize")]
    EmptyStats,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by flags or specs rather than by input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::InvalidSpec(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
