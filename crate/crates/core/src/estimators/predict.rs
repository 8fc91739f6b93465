use crate::dynamics::SystemModel;
use crate::error::NavError;
use crate::expm::state_transition_matrix;
use crate::linalg::symmetrize;
use crate::state::{Matrix8, StateVector};

use super::belief::{ensure_positive_definite, GaussianBelief};
use super::sigma::{sigma_points_from_factor, SigmaPointSet, UtParams};
use super::FilterKind;

/// A priori belief, plus the predicted sigma points for the unscented
/// variants (reused by the measurement update).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub belief: GaussianBelief,
    pub points: Option<SigmaPointSet>,
    /// The a posteriori covariance needed the one-time jitter repair.
    pub jittered: bool,
}

/// Mean by RK4, covariance by `Phi P Phi^T + Q` with `Phi = exp(J dt)`.
pub fn ekf_predict<M: SystemModel + ?Sized>(
    belief: &GaussianBelief,
    t: f64,
    dt: f64,
    model: &M,
) -> Result<Prediction, NavError> {
    if dt == 0.0 {
        return Ok(Prediction { belief: *belief, points: None, jittered: false });
    }
    let mean = model.propagate(&belief.mean, t, dt)?;
    let phi = model.transition(&belief.mean, t, dt)?;
    let cov = symmetrize(&(phi * belief.cov * phi.transpose() + *model.process_noise()));
    Ok(Prediction { belief: GaussianBelief::new(mean, cov), points: None, jittered: false })
}

fn prior_points(belief: &GaussianBelief, ut: &UtParams) -> Result<(SigmaPointSet, bool), NavError> {
    let repair = ensure_positive_definite(&belief.cov)?;
    Ok((sigma_points_from_factor(&belief.mean.0, &repair.factor, ut), repair.jittered))
}

fn recombine<M: SystemModel + ?Sized>(points: SigmaPointSet, model: &M, jittered: bool) -> Prediction {
    let mean = points.mean();
    let cov = symmetrize(&(points.covariance() + *model.process_noise()));
    Prediction { belief: GaussianBelief::new(StateVector(mean), cov), points: Some(points), jittered }
}

/// Every sigma point integrated with RK4; weighted mean and covariance + Q.
pub fn ukf_predict<M: SystemModel + ?Sized>(
    belief: &GaussianBelief,
    t: f64,
    dt: f64,
    model: &M,
    ut: &UtParams,
) -> Result<Prediction, NavError> {
    let (mut points, jittered) = prior_points(belief, ut)?;
    if dt == 0.0 {
        return Ok(Prediction { belief: *belief, points: Some(points), jittered });
    }
    let centre = model
        .propagate(&StateVector(points.centre), t, dt)
        .map_err(|_| NavError::SigmaPointPropagation { index: 0, t })?
        .0;
    for index in 1..points.offsets.len() {
        let next = model
            .propagate(&StateVector(points.point(index)), t, dt)
            .map_err(|_| NavError::SigmaPointPropagation { index, t })?;
        points.offsets[index] = next.0 - centre;
    }
    points.centre = centre;
    Ok(recombine(points, model, jittered))
}

/// Mean integrated once; sigma point offsets mapped by `exp(J dt)` with J at
/// the a posteriori mean.
pub fn spukf_predict<M: SystemModel + ?Sized>(
    belief: &GaussianBelief,
    t: f64,
    dt: f64,
    model: &M,
    ut: &UtParams,
) -> Result<Prediction, NavError> {
    let (points, jittered) = prior_points(belief, ut)?;
    if dt == 0.0 {
        return Ok(Prediction { belief: *belief, points: Some(points), jittered });
    }
    let mean = model.propagate(&belief.mean, t, dt).map_err(|_| NavError::SigmaPointPropagation { index: 0, t })?;
    let phi = model.transition(&belief.mean, t, dt)?;
    Ok(recombine(points.remap(mean.0, &phi), model, jittered))
}

/// Richardson-extrapolated offset map `2 Phi_2 Phi_1 - Phi_1 Phi_1`, where
/// `Phi_1 = exp(J(t) dt/2)` and `Phi_2 = exp(J(t + dt/2) dt/2)`; the full-step
/// map `exp(J(t) dt)` equals `Phi_1^2`.
pub fn espukf_transition<M: SystemModel + ?Sized>(
    model: &M,
    start: &StateVector,
    mid: &StateVector,
    t: f64,
    dt: f64,
) -> Result<Matrix8, NavError> {
    let half = 0.5 * dt;
    let phi1 = state_transition_matrix(&model.jacobian(start, t)?, half)?;
    let phi2 = state_transition_matrix(&model.jacobian(mid, t + half)?, half)?;
    Ok((phi2 * 2.0 - phi1) * phi1)
}

/// Mean integrated once (recording the midpoint); sigma point offsets mapped
/// by the Richardson-extrapolated transition.
pub fn espukf_predict<M: SystemModel + ?Sized>(
    belief: &GaussianBelief,
    t: f64,
    dt: f64,
    model: &M,
    ut: &UtParams,
) -> Result<Prediction, NavError> {
    let (points, jittered) = prior_points(belief, ut)?;
    if dt == 0.0 {
        return Ok(Prediction { belief: *belief, points: Some(points), jittered });
    }
    let (mid, mean) = model
        .propagate_with_midpoint(&belief.mean, t, dt)
        .map_err(|_| NavError::SigmaPointPropagation { index: 0, t })?;
    let map = espukf_transition(model, &belief.mean, &mid, t, dt)?;
    Ok(recombine(points.remap(mean.0, &map), model, jittered))
}

/// Dispatches on the filter kind.
pub fn predict<M: SystemModel + ?Sized>(
    kind: FilterKind,
    belief: &GaussianBelief,
    t: f64,
    dt: f64,
    model: &M,
    ut: &UtParams,
) -> Result<Prediction, NavError> {
    match kind {
        FilterKind::Ekf => ekf_predict(belief, t, dt, model),
        FilterKind::Ukf => ukf_predict(belief, t, dt, model, ut),
        FilterKind::Spukf => spukf_predict(belief, t, dt, model, ut),
        FilterKind::Espukf => espukf_predict(belief, t, dt, model, ut),
    }
}
