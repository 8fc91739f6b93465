//! Accuracy of the single-propagation sigma-point maps against full
//! propagation of every point.

use alloc::vec::Vec;

use crate::dynamics::SystemModel;
use crate::error::NavError;
use crate::linalg::cholesky8;
use crate::state::{Matrix8, StateVector, Vector8, STATE_DIM};
#[allow(unused_imports)]
use num_traits::Float;

use super::predict::espukf_transition;

/// Worst sigma-point error of both approximations at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSample {
    pub scale: f64,
    /// `max_i |propagate(mean) + exp(J dt) d_i - propagate(mean + d_i)|`.
    pub spukf_error: f64,
    /// Same with the Richardson-extrapolated map.
    pub espukf_error: f64,
}

/// Approximation errors for offsets `d_i = ±scale·sqrt(n)·L e_i` (L the
/// lower Cholesky factor of `cov`) over one step of length `dt` from `t`.
pub fn sigma_point_errors<M: SystemModel + ?Sized>(
    model: &M,
    mean: &StateVector,
    cov: &Matrix8,
    t: f64,
    dt: f64,
    scale: f64,
) -> Result<OrderSample, NavError> {
    let factor = cholesky8(cov)? * ((STATE_DIM as f64).sqrt() * scale);
    let (mid, centre) = model.propagate_with_midpoint(mean, t, dt)?;
    let phi = model.transition(mean, t, dt)?;
    let map = espukf_transition(model, mean, &mid, t, dt)?;
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for i in 0..STATE_DIM {
        for sign in [1.0, -1.0] {
            let d: Vector8 = factor.column(i) * sign;
            let full = model.propagate(&StateVector(mean.0 + d), t, dt)?.0 - centre.0;
            e1 = e1.max((phi * d - full).norm());
            e2 = e2.max((map * d - full).norm());
        }
    }
    Ok(OrderSample { scale, spukf_error: e1, espukf_error: e2 })
}

/// Errors as the sigma-point offsets are scaled by each of `scales` with
/// the step fixed.
pub fn offset_scaling<M: SystemModel + ?Sized>(
    model: &M,
    mean: &StateVector,
    cov: &Matrix8,
    t: f64,
    dt: f64,
    scales: &[f64],
) -> Result<Vec<OrderSample>, NavError> {
    scales.iter().map(|&s| sigma_point_errors(model, mean, cov, t, dt, s)).collect()
}

/// Errors as the step `dt0 · s` is scaled with the offsets fixed at
/// `offset_scale`.
pub fn step_scaling<M: SystemModel + ?Sized>(
    model: &M,
    mean: &StateVector,
    cov: &Matrix8,
    t: f64,
    dt0: f64,
    offset_scale: f64,
    scales: &[f64],
) -> Result<Vec<OrderSample>, NavError> {
    scales
        .iter()
        .map(|&s| sigma_point_errors(model, mean, cov, t, dt0 * s, offset_scale).map(|o| OrderSample { scale: s, ..o }))
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Fitted `(spukf, espukf)` slopes of a scaling sweep.
pub fn fitted_orders(samples: &[OrderSample]) -> (f64, f64) {
    let xs: Vec<f64> = samples.iter().map(|s| s.scale).collect();
    let e1: Vec<f64> = samples.iter().map(|s| s.spukf_error).collect();
    let e2: Vec<f64> = samples.iter().map(|s| s.espukf_error).collect();
    (loglog_slope(&xs, &e1), loglog_slope(&xs, &e2))
}
