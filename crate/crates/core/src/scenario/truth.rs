#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::dynamics::propagate;
use crate::error::NavError;
use crate::gnss::Vec3;
use crate::state::StateVector;

use super::ScenarioConfig;

/// Reference trajectory sampled at the measurement epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthLog {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
}

impl TruthLog {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrates the truth from liftoff with RK4 at the configured substep and
/// logs it at the epoch rate. Depends only on the vehicle, environment, site,
/// initial state and timing fields of `cfg`.
pub fn generate_truth(cfg: &ScenarioConfig) -> Result<TruthLog, NavError> {
    let n = cfg.epoch_count();
    let dt = 1.0 / cfg.epoch_rate;
    let substeps = ((dt / cfg.substep).round() as usize).max(1);
    let mut log = TruthLog {
        times: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        positions: Vec::with_capacity(n),
        velocities: Vec::with_capacity(n),
    };
    let mut s = cfg.truth_initial_state();
    for k in 0..n {
        let t = k as f64 * dt;
        if k > 0 {
            s = propagate(&s, dt, substeps, &cfg.vehicle, &cfg.environment, t - dt)?;
        }
        let (p, v) = cfg.site.user_ecef(&s);
        log.times.push(t);
        log.states.push(s);
        log.positions.push(p);
        log.velocities.push(v);
    }
    Ok(log)
}
