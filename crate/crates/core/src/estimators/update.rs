use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Dyn, OMatrix, U8};

use crate::error::NavError;
use crate::gnss::MeasurementEpoch;
use crate::linalg::symmetrize;
use crate::state::{Matrix8, StateVector};

use super::belief::GaussianBelief;
use super::measurement::MeasurementConfig;
use super::sigma::{SigmaPointSet, SIGMA_COUNT};
#[allow(unused_imports)]
use num_traits::Float;

/// Measurement residual `z - h(x)` of one update.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Innovation {
    pub residual: Vec<f64>,
}

impl Innovation {
    pub fn rms(&self) -> f64 {
        if self.residual.is_empty() {
            return 0.0;
        }
        (self.residual.iter().map(|r| r * r).sum::<f64>() / self.residual.len() as f64).sqrt()
    }
}

/// `K = PH^T S^-1` without forming the inverse.
fn gain(pht: &OMatrix<f64, U8, Dyn>, s: DMatrix<f64>) -> Result<OMatrix<f64, U8, Dyn>, NavError> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(NavError::SingularInnovation);
    }
    let chol = s.cholesky().ok_or(NavError::SingularInnovation)?;
    Ok(chol.solve(&pht.transpose()).transpose())
}

/// Linearized update with Joseph-form covariance.
pub fn kalman_update(
    belief: &GaussianBelief,
    epoch: &MeasurementEpoch,
    mm: &MeasurementConfig,
) -> Result<(GaussianBelief, Innovation), NavError> {
    if epoch.channels.is_empty() {
        return Ok((*belief, Innovation::default()));
    }
    let z = mm.observed(epoch);
    let predicted = mm.predict(&belief.mean, epoch);
    let h = mm.jacobian(&belief.mean, epoch);
    let r = mm.noise_diagonal(epoch);
    let pht = belief.cov * h.transpose();
    let mut s = &h * &pht;
    for i in 0..r.len() {
        s[(i, i)] += r[i];
    }
    let k = gain(&pht, s)?;
    let residual: DVector<f64> = z - predicted;
    let mean = belief.mean.0 + &k * &residual;
    let ikh = Matrix8::identity() - &k * &h;
    let mut krk = Matrix8::zeros();
    for (i, col) in k.column_iter().enumerate() {
        krk += col * col.transpose() * r[i];
    }
    let cov = symmetrize(&(ikh * belief.cov * ikh.transpose() + krk));
    Ok((GaussianBelief::new(StateVector(mean), cov), Innovation { residual: residual.iter().copied().collect() }))
}

/// Unscented update from the predicted sigma points.
pub fn sigma_point_update(
    belief: &GaussianBelief,
    points: &SigmaPointSet,
    epoch: &MeasurementEpoch,
    mm: &MeasurementConfig,
) -> Result<(GaussianBelief, Innovation), NavError> {
    if epoch.channels.is_empty() {
        return Ok((*belief, Innovation::default()));
    }
    let m = mm.dimension(epoch);
    let mut zs = DMatrix::zeros(m, SIGMA_COUNT);
    for j in 0..SIGMA_COUNT {
        mm.predict_into(&StateVector(points.point(j)), epoch, &mut zs.as_mut_slice()[j * m..(j + 1) * m]);
    }
    // weighted mean as offsets from the centre column
    let z0 = zs.column(0).clone_owned();
    let mut z_mean = z0.clone();
    for j in 1..SIGMA_COUNT {
        z_mean += (zs.column(j) - &z0) * points.wm[j];
    }
    let mut s = DMatrix::from_diagonal(&mm.noise_diagonal(epoch));
    let mut pxz = OMatrix::<f64, U8, Dyn>::zeros(m);
    let mut dz = DVector::zeros(m);
    for j in 0..SIGMA_COUNT {
        dz.copy_from(&zs.column(j));
        dz -= &z_mean;
        let dx = points.deviation(j, &belief.mean.0);
        s.ger(points.wc[j], &dz, &dz, 1.0);
        pxz.ger(points.wc[j], &dx, &dz, 1.0);
    }
    let k = gain(&pxz, s)?;
    let residual = mm.observed(epoch) - z_mean;
    let mean = belief.mean.0 + &k * &residual;
    // K S K^T = K Pxz^T
    let cov = symmetrize(&(belief.cov - &k * pxz.transpose()));
    Ok((GaussianBelief::new(StateVector(mean), cov), Innovation { residual: residual.iter().copied().collect() }))
}
