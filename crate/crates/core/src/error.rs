//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the solver and the verification layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Weight parameters violate the admissibility conditions
    /// (a >= 0, 0 <= b <= 1, ab < 1, or a divergent companion integral).
    #[error("weight not admissible: {0}")]
    NotAdmissible(String),

    /// Weight evaluation left the representable range.
    #[error("weight evaluation out of range at x = {x}: log-value {log_value}")]
    Range { x: f64, log_value: f64 },

    /// The logarithmic derivative |phi'/phi| has no finite essential bound.
    #[error("derivative bound unbounded: {0}")]
    UnboundedDerivative(String),

    /// Two sampled functions live on different grids.
    #[error("grid mismatch: {0}")]
    ShapeMismatch(String),

    /// Invalid grid construction or an empty / out-of-range window.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The solution broke down (gradient blow-up or NaN) at time `t`.
    #[error("blow-up detected at t = {t}")]
    BlowUp { t: f64 },

    /// Solution mass reached the edge of the truncated domain at time `t`.
    #[error("domain too small: tail {tail:.3e} exceeds {limit:.3e} at t = {t}")]
    DomainTooSmall { t: f64, tail: f64, limit: f64 },

    /// A weighted norm diverges (weight grows faster than the field decays).
    #[error("infinite weighted norm: {0}")]
    InfiniteNorm(String),

    /// No admissible samples in the requested fit window.
    #[error("window error: {0}")]
    Window(String),

    /// Snapshot stride too coarse for finite differencing; a refusal, not a fail.
    #[error("stride too coarse: {0}")]
    StrideTooCoarse(String),

    /// Malformed configuration or data file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Filesystem failure while writing or reading artifacts.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
