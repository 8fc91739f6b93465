//! Vehicle, environment and process-noise parameters.

use alloc::vec::Vec;

use crate::error::NavError;
use crate::state::{Matrix8, STATE_DIM};

/// One propulsive stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageParams {
    /// Dry mass dropped at burnout (kg).
    pub inert_mass: f64,
    /// Propellant load (kg).
    pub propellant_mass: f64,
    /// Thrust (N).
    pub thrust: f64,
    /// Specific impulse (s).
    pub isp: f64,
    /// Burn duration (s).
    pub burn_duration: f64,
}

/// Allowed relative mismatch between `thrust / (isp g0) * burn_duration` and
/// the propellant load.
pub const PROPELLANT_BUDGET_TOLERANCE: f64 = 0.02;

impl StageParams {
    /// Checks positivity and the propellant budget against `g0`.
    pub fn validate(&self, g0: f64) -> Result<(), NavError> {
        let fields = [self.inert_mass, self.propellant_mass, self.thrust, self.isp, self.burn_duration];
        if fields.iter().any(|f| !f.is_finite()) {
            return Err(NavError::NonFinite { what: "stage parameters" });
        }
        if fields.iter().any(|&f| f <= 0.0) {
            return Err(NavError::InvalidArgument("stage parameters must be strictly positive"));
        }
        let burned = self.thrust / (self.isp * g0) * self.burn_duration;
        if ((burned - self.propellant_mass) / self.propellant_mass).abs() > PROPELLANT_BUDGET_TOLERANCE {
            return Err(NavError::InvalidArgument(
                "stage mass flow times burn duration disagrees with propellant mass",
            ));
        }
        Ok(())
    }
}

/// Staged vehicle plus the pitch-kick that starts the gravity turn.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleConfig {
    /// Stages in firing order; each ignites at the previous one's burnout.
    pub stages: Vec<StageParams>,
    pub payload_mass: f64,
    pub spacecraft_mass: f64,
    /// Frontal reference area (m^2).
    pub frontal_area: f64,
    /// Time at which the flight path angle is reset (s).
    pub pitch_kick_time: f64,
    /// Tilt from vertical applied at the kick (rad).
    pub pitch_kick_angle: f64,
}

/// Allowed relative mismatch between the summed vehicle masses and m(0).
pub const INITIAL_MASS_TOLERANCE: f64 = 0.005;

/// A discontinuity in the otherwise smooth dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Gamma is set to pi/2 - angle.
    PitchKick { angle: f64 },
    /// Stage `stage` burns out and its inert mass is dropped.
    Burnout { stage: usize, inert_mass: f64 },
}

impl VehicleConfig {
    pub fn total_mass(&self) -> f64 {
        self.stages.iter().map(|s| s.inert_mass + s.propellant_mass).sum::<f64>()
            + self.payload_mass
            + self.spacecraft_mass
    }

    /// Ignition time of stage `i` (zero-duration staging).
    pub fn stage_start(&self, i: usize) -> f64 {
        self.stages[..i].iter().map(|s| s.burn_duration).sum()
    }

    pub fn burnout_time(&self, i: usize) -> f64 {
        self.stage_start(i) + self.stages[i].burn_duration
    }

    /// End of powered flight.
    pub fn final_burnout(&self) -> f64 {
        self.stages.iter().map(|s| s.burn_duration).sum()
    }

    /// Index of the stage burning at `t`, using half-open `[start, burnout)`
    /// windows. `None` before liftoff and during coast.
    pub fn active_stage(&self, t: f64) -> Option<usize> {
        if t < 0.0 {
            return None;
        }
        let mut start = 0.0;
        for (i, s) in self.stages.iter().enumerate() {
            let end = start + s.burn_duration;
            if t < end {
                return Some(i);
            }
            start = end;
        }
        None
    }

    /// Calls `f(time, event)` for every event in the half-open window
    /// `(t0, t1]`, in time order. Simultaneous events are reported kick first.
    pub fn for_each_event(&self, t0: f64, t1: f64, mut f: impl FnMut(f64, Event)) {
        let mut burnout = 0.0;
        let mut kick_done = false;
        let kick = self.pitch_kick_time;
        for (i, s) in self.stages.iter().enumerate() {
            burnout += s.burn_duration;
            if !kick_done && kick <= burnout {
                if kick > t0 && kick <= t1 {
                    f(kick, Event::PitchKick { angle: self.pitch_kick_angle });
                }
                kick_done = true;
            }
            if burnout > t0 && burnout <= t1 {
                f(burnout, Event::Burnout { stage: i, inert_mass: s.inert_mass });
            }
        }
        if !kick_done && kick > t0 && kick <= t1 {
            f(kick, Event::PitchKick { angle: self.pitch_kick_angle });
        }
    }

    /// Validates all stages and the mass budget against the initial mass.
    pub fn validate(&self, env: &Environment, initial_mass: f64) -> Result<(), NavError> {
        if self.stages.is_empty() {
            return Err(NavError::InvalidArgument("vehicle has no stages"));
        }
        for s in &self.stages {
            s.validate(env.g0)?;
        }
        if self.frontal_area <= 0.0 || self.payload_mass < 0.0 || self.spacecraft_mass < 0.0 {
            return Err(NavError::InvalidArgument("vehicle masses/area out of range"));
        }
        if ((self.total_mass() - initial_mass) / initial_mass).abs() > INITIAL_MASS_TOLERANCE {
            return Err(NavError::InvalidArgument("summed vehicle masses disagree with the initial mass"));
        }
        Ok(())
    }
}

/// Earth and atmosphere constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub earth_radius: f64,
    /// Surface gravity (m/s^2).
    pub g0: f64,
    /// Sea-level density (kg/m^3).
    pub rho0: f64,
    /// Density scale height (m).
    pub scale_height: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment { earth_radius: 6_378_137.0, g0: 9.80665, rho0: 1.225, scale_height: 7500.0 }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<(), NavError> {
        let f = [self.earth_radius, self.g0, self.rho0, self.scale_height];
        if f.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(NavError::InvalidArgument("environment constants must be positive"));
        }
        Ok(())
    }
}

/// Additive process noise covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessNoise(pub Matrix8);

impl ProcessNoise {
    pub fn isotropic(q: f64) -> Self {
        ProcessNoise(Matrix8::identity() * q)
    }

    pub fn diagonal(d: [f64; STATE_DIM]) -> Self {
        ProcessNoise(Matrix8::from_diagonal(&d.into()))
    }

    /// Checks symmetry and positive semidefiniteness (Cholesky of Q plus a
    /// relative jitter of 1e-12).
    pub fn validate(&self) -> Result<(), NavError> {
        let q = &self.0;
        if q.iter().any(|v| !v.is_finite()) {
            return Err(NavError::NonFinite { what: "process noise" });
        }
        let scale = q.amax().max(f64::MIN_POSITIVE);
        if (q - q.transpose()).amax() > 1e-12 * scale {
            return Err(NavError::InvalidArgument("process noise is not symmetric"));
        }
        let mut shifted = *q + Matrix8::identity() * (scale * 1e-12);
        crate::linalg::cholesky_in_place(shifted.as_mut_slice(), STATE_DIM)
            .map_err(|_| NavError::InvalidArgument("process noise is not positive semidefinite"))?;
        Ok(())
    }
}
