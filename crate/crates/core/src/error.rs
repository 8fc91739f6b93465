use core::fmt;

/// Errors raised by the dynamics, measurement and filter routines.
#[derive(Debug, Clone, PartialEq)]
pub enum NavError {
    /// A state or matrix entry was NaN or infinite.
    NonFinite { what: &'static str },
    /// Speed reached zero or below; the flight-path-angle rate is undefined.
    Singularity { t: f64 },
    /// A state left the accepted domain during integration.
    InvalidState { t: f64, reason: &'static str },
    /// An argument violated an operation precondition.
    InvalidArgument(&'static str),
    /// Cholesky factorization failed at the given (zero-based) leading minor.
    NotPositiveDefinite { minor: usize },
    /// Full propagation of one sigma point failed.
    SigmaPointPropagation { index: usize, t: f64 },
    /// Fewer satellites are visible than were requested.
    InsufficientSatellites { visible: usize, requested: usize },
    /// The line-of-sight geometry matrix is rank deficient.
    SingularGeometry,
    /// The innovation covariance could not be factorized.
    SingularInnovation,
    /// Elevation is below the configured mask.
    BelowElevationMask { elevation: f64 },
    /// A ratio denominator was zero.
    ZeroDenominator(&'static str),
}

impl fmt::Display for NavError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavError::NonFinite { what } => write!(f, "non-finite value in {what}"),
            NavError::Singularity { t } => {
                write!(f, "speed is not positive at t = {t} s (flight path angle rate undefined)")
            }
            NavError::InvalidState { t, reason } => write!(f, "invalid state at t = {t} s: {reason}"),
            NavError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            NavError::NotPositiveDefinite { minor } => {
                write!(f, "matrix is not positive definite (leading minor {minor})")
            }
            NavError::SigmaPointPropagation { index, t } => {
                write!(f, "propagation of sigma point {index} failed at t = {t} s")
            }
            NavError::InsufficientSatellites { visible, requested } => {
                write!(f, "{requested} satellites requested but only {visible} visible")
            }
            NavError::SingularGeometry => write!(f, "satellite geometry is singular"),
            NavError::SingularInnovation => write!(f, "innovation covariance is singular"),
            NavError::BelowElevationMask { elevation } => {
                write!(f, "elevation {elevation} rad is below the mask")
            }
            NavError::ZeroDenominator(what) => write!(f, "{what} is zero"),
        }
    }
}

impl core::error::Error for NavError {}
