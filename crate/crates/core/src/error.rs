use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("multiplier is not finite at wavenumber {wavenumber}")]
    NonFiniteSymbol { wavenumber: f64 },

    #[error("horizon {span} is not an integral multiple of dt = {dt}")]
    HorizonNotDivisible { span: f64, dt: f64 },

    #[error("step count {steps} is not divisible by record interval {every}")]
    RecordIntervalMismatch { steps: usize, every: usize },

    #[error("divergence at step {step} (t = {time}): {reason}")]
    Blowup {
        step: usize,
        time: f64,
        reason: String,
    },

    #[error("time lattice [{start}, {end}] does not cover [0, {required}]")]
    WindowTooShort { start: f64, end: f64, required: f64 },

    #[error("band separation ratio {ratio} is below the required {required}")]
    BandSeparation { ratio: f64, required: f64 },

    #[error("unknown counter-example family `{0}`")]
    UnknownFamily(String),

    #[error("unknown estimate `{0}`")]
    UnknownEstimate(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("right-hand side vanishes")]
    ZeroRhs,

    #[error("cutoff N = {cutoff} exceeds half the grid bandwidth {max_wavenumber}")]
    BandwidthExceeded { cutoff: f64, max_wavenumber: f64 },

    #[error("dt = {dt} too large for sigma = {sigma} (need dt <= sigma/10)")]
    Stiffness { dt: f64, sigma: f64 },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Blowup { .. } | Error::Quadrature { .. } | Error::NonFiniteSymbol { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
