use thiserror::Error;

/// Errors raised by the waveguide imaging pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no guided modes at omega = {omega} (cutoff not reached)")]
    NoGuidedModes { omega: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mode index {index} out of range (mode count {count})")]
    ModeIndex { index: usize, count: usize },

    #[error("quadrature did not converge: relative change {change:e} after {panels} panels")]
    QuadratureNotConverged { change: f64, panels: usize },

    #[error("field samples and operator were built on different array geometries")]
    GeometryMismatch,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("operator is singular (min/max spectrum ratio {ratio:e}); use a regularizer")]
    SingularUnregularized { ratio: f64 },

    #[error("{receivers} receivers cannot resolve {modes} guided modes")]
    TooFewReceivers { receivers: usize, modes: usize },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
