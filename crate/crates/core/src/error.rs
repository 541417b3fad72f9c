use alloc::string::String;
use alloc::vec::Vec;

/// Everything that can go wrong inside the core pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("aliasing: {freq_hz} Hz is at or above the Nyquist frequency {nyquist_hz} Hz")]
    Aliasing { freq_hz: f64, nyquist_hz: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{root} is not a primitive root modulo {prime}")]
    NotPrimitiveRoot { root: u64, prime: u64 },

    #[error("waveform has no nonzero sample")]
    ZeroWaveform,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("input length {len} is not a multiple of 16 (four stride-2 stages must divide it exactly)")]
    LengthNotMultipleOf16 { len: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("stale forward cache: parameters changed since the forward pass")]
    StaleCache,

    #[error("non-finite gradient in layer {layer}")]
    NonFiniteGradient { layer: usize },

    #[error("non-finite loss at iteration {iteration} (batch indices {batch:?})")]
    NonFiniteLoss { iteration: usize, batch: Vec<usize> },

    #[error("iteration {iteration} is outside the schedule of {total} iterations")]
    IterationOutOfRange { iteration: usize, total: usize },

    #[error("{count} points are too few for perplexity {perplexity}: at least {minimum} required")]
    TooFewPoints {
        count: usize,
        minimum: usize,
        perplexity: f64,
    },

    #[error("mean squared error must be positive, got {0}")]
    NonPositiveMse(f64),

    #[error("{0}")]
    Observer(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
