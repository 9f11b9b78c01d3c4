use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TmaError {
    #[error("parameter `{0}` must be positive")]
    NonPositiveParameter(&'static str),
    #[error("number of phase states must be at least 2, got {0}")]
    PhaseCountTooSmall(usize),
    #[error("{what} index {index} out of range 0..{bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("delay {delay} out of range 0..{count}")]
    DelayOutOfRange { delay: usize, count: usize },
    #[error("taper level {level} out of range 0..={o_tau}")]
    TaperOutOfRange { level: usize, o_tau: usize },
    #[error("rate mismatch: {0}")]
    RateMismatch(String),
    #[error("invalid angle grid: {0}")]
    InvalidGrid(String),
    #[error("no intermediate taper levels for o_tau = {0} (needs o_tau >= 2)")]
    NoTaperLevels(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, TmaError>;
