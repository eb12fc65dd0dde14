use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("effective SNR must be finite and non-negative, got {0}")]
    NegativeSnr(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid antenna count {nt}: {reason}")]
    AntennaCount { nt: usize, reason: &'static str },

    #[error("channel vector has zero norm")]
    ZeroChannel,

    #[error("dimension mismatch: channel has {channel} entries, codebook vectors have {codebook}")]
    DimensionMismatch { channel: usize, codebook: usize },

    #[error("Blahut-Arimoto did not converge within {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
