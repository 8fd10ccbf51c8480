use thiserror::Error;

/// Errors produced by the sensing toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The steady-state denominator collapsed below the degeneracy guard (1e-30).
    #[error("degenerate parameters: steady-state denominator magnitude {0:.3e} below 1e-30")]
    DegenerateParameters(f64),

    /// A scan or range argument is malformed (empty, reversed, or degenerate).
    #[error("invalid range: {0}")]
    InvalidRange(String),

    /// A spectrum handed to `fwhm` has no half-maximum crossing on one side.
    #[error("not a peak: {0}")]
    NotAPeak(String),

    /// Root bracketing failed during calibration.
    #[error("calibration bracket exhausted: {0}")]
    BracketExhausted(String),

    /// Fisher information vanished, so no finite variance bound exists.
    #[error("unresolvable parameter: Fisher information is not positive ({0:.3e})")]
    UnresolvableParameter(f64),

    /// A sensor configuration cannot support the requested operation
    /// (zero bias, zero slope at the operating point, and the like).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Likelihood maximization failed to bracket a maximum.
    #[error("likelihood maximization failed: {0}")]
    Likelihood(String),
}

pub type Result<T> = std::result::Result<T, Error>;
