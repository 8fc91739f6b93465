use alloc::vec::Vec;

use crate::dynamics::SystemModel;
use crate::error::NavError;
use crate::gnss::MeasurementEpoch;
use crate::state::{StateVector, Vector8};
#[allow(unused_imports)]
use num_traits::Float;

use super::belief::{ensure_positive_definite, GaussianBelief};
use super::measurement::MeasurementConfig;
use super::predict::predict;
use super::sigma::UtParams;
use super::update::{kalman_update, sigma_point_update, Innovation};
use super::FilterKind;

/// Monotonic time source in seconds. The core crate has no clock of its own.
pub trait StepClock {
    fn now(&mut self) -> f64;
}

/// Clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl StepClock for NoClock {
    fn now(&mut self) -> f64 {
        0.0
    }
}

/// Wall time spent in one predict/update pair (s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FilterStepTiming {
    pub predict: f64,
    pub update: f64,
}

impl FilterStepTiming {
    pub fn total(&self) -> f64 {
        self.predict + self.update
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub t: f64,
    pub estimate: StateVector,
    /// `estimate - truth`.
    pub error: Vector8,
    pub cov_trace: f64,
    pub innovation: Innovation,
    pub timing: FilterStepTiming,
    /// The covariance needed the jitter repair this epoch.
    pub repaired: bool,
}

/// Output of one filter over one observation stream.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterRun {
    pub kind: FilterKind,
    pub initial: GaussianBelief,
    pub records: Vec<EpochRecord>,
    /// Time and cause of the first unrecoverable step error.
    pub diverged: Option<(f64, NavError)>,
}

impl FilterRun {
    pub fn is_diverged(&self) -> bool {
        self.diverged.is_some()
    }

    /// Mean over epochs of the down-range/altitude error norm.
    pub fn mean_position_error(&self) -> f64 {
        mean_of(self.records.iter().map(|r| position_error(&r.error)))
    }

    /// Mean over epochs of the absolute speed error.
    pub fn mean_speed_error(&self) -> f64 {
        mean_of(self.records.iter().map(|r| r.error[crate::state::idx::V].abs()))
    }

    /// Mean predict+update duration (s).
    pub fn mean_step_time(&self) -> f64 {
        mean_of(self.records.iter().map(|r| r.timing.total()))
    }
}

fn mean_of(it: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Euclidean error in the (down-range, altitude) plane.
pub fn position_error(error: &Vector8) -> f64 {
    error[0].hypot(error[1])
}

/// Runs one filter over a time-ordered stream. `truth[i]` is the true state
/// at `epochs[i].t`; the initial belief is taken to be valid at `t0`.
///
/// Each epoch is a predict to its time (skipped when it coincides with the
/// current time) followed by an update. Only those two calls are timed. A
/// step error stops the run and is recorded; earlier epochs are kept.
#[allow(clippy::too_many_arguments)]
pub fn run_filter<M: SystemModel + ?Sized, C: StepClock>(
    kind: FilterKind,
    init: &GaussianBelief,
    t0: f64,
    epochs: &[MeasurementEpoch],
    truth: &[StateVector],
    model: &M,
    mm: &MeasurementConfig,
    ut: &UtParams,
    clock: &mut C,
) -> FilterRun {
    let mut run = FilterRun { kind, initial: *init, records: Vec::with_capacity(epochs.len()), diverged: None };
    let mut belief = *init;
    let mut t = t0;
    for (epoch, truth_state) in epochs.iter().zip(truth) {
        let start = clock.now();
        let step = (|| {
            let prediction = predict(kind, &belief, t, epoch.t - t, model, ut)?;
            let after_predict = clock.now();
            let (posterior, innovation) = match &prediction.points {
                Some(points) => sigma_point_update(&prediction.belief, points, epoch, mm)?,
                None => kalman_update(&prediction.belief, epoch, mm)?,
            };
            let repair = ensure_positive_definite(&posterior.cov)?;
            let end = clock.now();
            let belief = GaussianBelief::new(posterior.mean, repair.cov);
            belief.mean.check_finite()?;
            Ok::<_, NavError>((
                belief,
                innovation,
                FilterStepTiming { predict: after_predict - start, update: end - after_predict },
                prediction.jittered || repair.jittered,
            ))
        })();
        match step {
            Ok((posterior, innovation, timing, repaired)) => {
                belief = posterior;
                t = epoch.t;
                run.records.push(EpochRecord {
                    t,
                    estimate: belief.mean,
                    error: belief.mean.0 - truth_state.0,
                    cov_trace: belief.cov.trace(),
                    innovation,
                    timing,
                    repaired,
                });
            }
            Err(e) => {
                run.diverged = Some((epoch.t, e));
                break;
            }
        }
    }
    run
}
