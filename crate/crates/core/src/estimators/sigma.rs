use crate::error::NavError;
use crate::state::{Matrix8, Vector8, STATE_DIM};

use super::belief::GaussianBelief;
#[allow(unused_imports)]
use num_traits::Float;

/// `2n + 1` for the 8-state filter.
pub const SIGMA_COUNT: usize = 2 * STATE_DIM + 1;

/// Scaled unscented transform parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for UtParams {
    fn default() -> Self {
        UtParams { alpha: 1e-3, beta: 2.0, kappa: 0.0 }
    }
}

impl UtParams {
    /// `lambda = alpha^2 (n + kappa) - n`.
    pub fn lambda(&self) -> f64 {
        let n = STATE_DIM as f64;
        self.alpha * self.alpha * (n + self.kappa) - n
    }

    /// `n + lambda`, the squared offset scale.
    pub fn spread(&self) -> f64 {
        STATE_DIM as f64 + self.lambda()
    }

    pub fn validate(&self) -> Result<(), NavError> {
        if !(self.alpha > 0.0) || !self.beta.is_finite() || !self.kappa.is_finite() {
            return Err(NavError::InvalidArgument("UT parameters out of range"));
        }
        if !(self.spread() > 0.0) {
            return Err(NavError::InvalidArgument("UT spread n + lambda must be positive"));
        }
        Ok(())
    }

    /// Mean and covariance weights.
    pub fn weights(&self) -> ([f64; SIGMA_COUNT], [f64; SIGMA_COUNT]) {
        let c = self.spread();
        let lambda = self.lambda();
        let mut wm = [0.5 / c; SIGMA_COUNT];
        let mut wc = wm;
        wm[0] = lambda / c;
        wc[0] = lambda / c + 1.0 - self.alpha * self.alpha + self.beta;
        (wm, wc)
    }
}

/// The `2n + 1` sigma points, stored as a centre and per-point offsets so
/// that offsets far smaller than the centre keep full precision. Point 0 is
/// the centre (zero offset); points `1..=n` and `n+1..=2n` are the `+` and
/// `-` offsets along each factor column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPointSet {
    pub centre: Vector8,
    pub offsets: [Vector8; SIGMA_COUNT],
    pub wm: [f64; SIGMA_COUNT],
    pub wc: [f64; SIGMA_COUNT],
}

impl SigmaPointSet {
    /// Absolute position of point `i`.
    pub fn point(&self, i: usize) -> Vector8 {
        self.centre + self.offsets[i]
    }

    /// Weighted offsets; mirrored pairs are added first so that symmetric
    /// sets cancel exactly.
    fn mean_offset(&self) -> Vector8 {
        let mut acc = self.offsets[0] * self.wm[0];
        for i in 1..=STATE_DIM {
            let j = i + STATE_DIM;
            acc += self.offsets[i] * self.wm[i] + self.offsets[j] * self.wm[j];
        }
        acc
    }

    /// Weighted mean.
    pub fn mean(&self) -> Vector8 {
        self.centre + self.mean_offset()
    }

    /// Weighted outer products about the weighted mean.
    pub fn covariance(&self) -> Matrix8 {
        let shift = self.mean_offset();
        let mut p = Matrix8::zeros();
        for (o, w) in self.offsets.iter().zip(&self.wc) {
            let d = o - shift;
            p.ger(*w, &d, &d, 1.0);
        }
        p
    }

    /// Offset of every point from `x` (e.g. the weighted mean).
    pub fn deviation(&self, i: usize, x: &Vector8) -> Vector8 {
        self.offsets[i] - (x - self.centre)
    }

    /// Same weights, points `centre + map(offset_i)`.
    pub fn remap(&self, centre: Vector8, map: &Matrix8) -> SigmaPointSet {
        let mut offsets = [Vector8::zeros(); SIGMA_COUNT];
        for (dst, src) in offsets.iter_mut().zip(&self.offsets) {
            *dst = map * src;
        }
        SigmaPointSet { centre, offsets, wm: self.wm, wc: self.wc }
    }
}

/// Sigma points from a lower Cholesky factor of the covariance.
pub fn sigma_points_from_factor(mean: &Vector8, factor: &Matrix8, params: &UtParams) -> SigmaPointSet {
    let (wm, wc) = params.weights();
    let scale = params.spread().sqrt();
    let mut offsets = [Vector8::zeros(); SIGMA_COUNT];
    for i in 0..STATE_DIM {
        let col = factor.column(i) * scale;
        offsets[1 + i] = col;
        offsets[1 + STATE_DIM + i] = -col;
    }
    SigmaPointSet { centre: *mean, offsets, wm, wc }
}

/// Scaled-UT sigma points of `belief`. Fails with the offending leading minor
/// when the covariance is not positive definite.
pub fn generate_sigma_points(belief: &GaussianBelief, params: &UtParams) -> Result<SigmaPointSet, NavError> {
    let factor = crate::linalg::cholesky8(&belief.cov)?;
    Ok(sigma_points_from_factor(&belief.mean.0, &factor, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    #[test]
    fn weights_sum_to_one() {
        for p in [UtParams::default(), UtParams { alpha: 1.0, beta: 2.0, kappa: 0.0 }] {
            let (wm, _) = p.weights();
            assert!((wm.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_offsets_have_norm_sqrt_8() {
        let b = GaussianBelief::new(StateVector(Vector8::zeros()), Matrix8::identity());
        let s = generate_sigma_points(&b, &UtParams { alpha: 1.0, beta: 2.0, kappa: 0.0 }).unwrap();
        for p in &s.offsets[1..] {
            assert!((p.norm() - 8f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn non_pd_names_minor() {
        let mut cov = Matrix8::identity();
        cov[(4, 4)] = 0.0;
        let b = GaussianBelief::new(StateVector(Vector8::zeros()), cov);
        assert_eq!(generate_sigma_points(&b, &UtParams::default()), Err(NavError::NotPositiveDefinite { minor: 4 }));
    }
}
