use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("squeezing must be finite and non-negative, got {0} dB")]
    NegativeSqueezing(f64),

    #[error("squeezing parameter y = {0} outside [0, 0.5)")]
    SqueezeParameterOutOfDomain(f64),

    #[error("beam-splitter parameter B = {0} must be finite and positive")]
    InvalidSplitterParameter(f64),

    #[error("transmittance t = {0} outside (0, 1]")]
    InvalidTransmittance(f64),

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("truncation at cutoff {cutoff} leaves tail weight {tail:e} above tolerance {tolerance:e}")]
    Truncation { cutoff: usize, tail: f64, tolerance: f64 },

    #[error("distortion factor for outcome ({k1}, {k2}) is undefined at y = {y}")]
    DegenerateOutcome { k1: usize, k2: usize, y: f64 },

    #[error("invalid bracket [{lo}, {hi}] for B")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}
