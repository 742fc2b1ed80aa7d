use thiserror::Error;

/// Errors raised by model construction and the simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid simplex point: {0}")]
    InvalidSimplex(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty potential-parent sample")]
    EmptySample,

    #[error("rule `{rule}` does not define a colouring for samples of size {size}")]
    UnsupportedSampleSize { rule: &'static str, size: usize },

    #[error(
        "Bernstein coefficient {value} of component {component} at multi-index {multi_index:?} lies outside [0, 1]"
    )]
    BernsteinOutOfRange {
        component: usize,
        multi_index: Vec<u32>,
        value: f64,
    },

    #[error("Bernstein coefficients at multi-index {multi_index:?} sum to {sum}, not 1")]
    BernsteinRowSum { multi_index: Vec<u32>, sum: f64 },

    #[error("lambda_nk needs 2 <= k <= n, got n = {n}, k = {k}")]
    CollisionIndex { n: u64, k: u64 },

    #[error("N = {n} too small for this Lambda: gamma_N = {gamma} exceeds 1 even at the smallest admissible rho_N")]
    InfeasibleSchedule { n: u64, gamma: f64 },

    #[error("fixation probabilities need a transitive drift, got `{0}`")]
    NonTransitiveDrift(String),

    #[error("ancestral state exceeded the explosion guard {limit} at t = {time}")]
    RateExplosion { limit: u64, time: f64 },

    #[error("ancestral process looks transient: state {state} exceeded cap {cap} at t = {time}")]
    Transient { state: u64, cap: u64, time: f64 },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
