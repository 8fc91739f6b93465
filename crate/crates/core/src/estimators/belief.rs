use crate::error::NavError;
use crate::linalg::{cholesky8, relative_asymmetry, symmetrize};
use crate::state::{Matrix8, StateVector, STATE_DIM};

/// Mean and covariance of the state estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBelief {
    pub mean: StateVector,
    pub cov: Matrix8,
}

impl GaussianBelief {
    pub fn new(mean: StateVector, cov: Matrix8) -> Self {
        GaussianBelief { mean, cov }
    }

    /// Symmetric to 1e-12 relative and Cholesky-factorizable.
    pub fn validate(&self) -> Result<(), NavError> {
        self.mean.check_finite()?;
        if self.cov.iter().any(|v| !v.is_finite()) {
            return Err(NavError::NonFinite { what: "covariance" });
        }
        if relative_asymmetry(&self.cov) > 1e-12 {
            return Err(NavError::InvalidArgument("covariance is not symmetric"));
        }
        cholesky8(&self.cov).map(|_| ())
    }
}

/// Outcome of [`ensure_positive_definite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Repair {
    /// Lower Cholesky factor of the (possibly repaired) covariance.
    pub factor: Matrix8,
    pub cov: Matrix8,
    pub jittered: bool,
}

/// Symmetrizes `p` and factorizes it. On failure adds
/// `1e-6 trace(P) / 8 * I` once and retries; a second failure is returned.
pub fn ensure_positive_definite(p: &Matrix8) -> Result<Repair, NavError> {
    let sym = symmetrize(p);
    match cholesky8(&sym) {
        Ok(factor) => Ok(Repair { factor, cov: sym, jittered: false }),
        Err(_) => {
            let jitter = 1e-6 * sym.trace().abs() / STATE_DIM as f64;
            let repaired = sym + Matrix8::identity() * jitter;
            let factor = cholesky8(&repaired)?;
            Ok(Repair { factor, cov: repaired, jittered: true })
        }
    }
}
