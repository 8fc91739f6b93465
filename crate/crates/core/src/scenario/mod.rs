//! CRS-5 mission assembly: configuration, reference trajectory, observation
//! stream and filter initialization.

mod crs5;
mod stream;
mod truth;

pub use crs5::{build_crs5, crs5_vehicle, CRS5_INITIAL_COVARIANCE, CRS5_INITIAL_STATE};
pub use stream::{generate_observations, initial_estimate, measurement_stream, run_seed};
pub use truth::{generate_truth, TruthLog};

#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::AscentModel;
use crate::error::NavError;
use crate::estimators::{GaussianBelief, MeasurementConfig, MeasurementMode, UtParams};
use crate::gnss::{Almanac, ErrorBudget, LaunchSiteFrame};
use crate::state::StateVector;
use crate::vehicle::{Environment, ProcessNoise, VehicleConfig};

/// Channel counts the receiver can be restricted to.
pub const CHANNEL_OPTIONS: [usize; 4] = [4, 6, 8, 10];

/// Everything needed to generate one scenario and run the filters on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub vehicle: VehicleConfig,
    pub environment: Environment,
    pub budget: ErrorBudget,
    pub almanac: Almanac,
    pub site: LaunchSiteFrame,
    /// Number of receiver channels.
    pub channels: usize,
    /// Measurement rate (Hz).
    pub epoch_rate: f64,
    /// Simulated span from liftoff (s).
    pub duration: f64,
    pub mode: MeasurementMode,
    /// Apply the GRAPHIC combination to remove the ionosphere.
    pub use_graphic: bool,
    pub ut: UtParams,
    /// Filter initialization.
    pub init: GaussianBelief,
    pub process_noise: ProcessNoise,
    /// True receiver clock bias at liftoff (m) and its constant rate (m/s).
    pub truth_clock_bias: f64,
    pub truth_clock_drift: f64,
    /// RK4 substep (s).
    pub substep: f64,
    /// Master seed; each Monte Carlo run derives its own stream.
    pub seed: u64,
    /// Draw each run's initial estimate from N(truth, P(0)) instead of using
    /// the nominal initial mean.
    pub perturb_initial_estimate: bool,
}

impl ScenarioConfig {
    /// The true state at liftoff: the nominal initial mean with the truth
    /// clock terms.
    pub fn truth_initial_state(&self) -> StateVector {
        let mut s = self.init.mean;
        s.0[crate::state::idx::B] = self.truth_clock_bias;
        s.0[crate::state::idx::B_DOT] = self.truth_clock_drift;
        s
    }

    pub fn epoch_count(&self) -> usize {
        (self.duration * self.epoch_rate).round() as usize + 1
    }

    pub fn model(&self) -> AscentModel {
        AscentModel::new(self.vehicle.clone(), self.environment, self.process_noise, self.substep)
    }

    /// Filter measurement model. The GRAPHIC range carries half the sum of
    /// the code and carrier noise variances' square root.
    pub fn measurement_config(&self) -> MeasurementConfig {
        let b = &self.budget;
        let sigma_range = if self.use_graphic {
            0.5 * (b.sigma_rho * b.sigma_rho + b.sigma_phi * b.sigma_phi).sqrt()
        } else {
            b.sigma_rho
        };
        MeasurementConfig {
            frame: self.site,
            mode: self.mode,
            sigma_range: sigma_range.max(1e-3),
            sigma_rate: b.sigma_rate.max(1e-4),
        }
    }

    pub fn validate(&self) -> Result<(), NavError> {
        self.environment.validate()?;
        self.vehicle.validate(&self.environment, self.init.mean.m())?;
        self.budget.validate()?;
        self.process_noise.validate()?;
        self.ut.validate()?;
        self.init.validate()?;
        if self.channels < 4 {
            return Err(NavError::InvalidArgument("channel count must be at least 4"));
        }
        if !(self.epoch_rate > 0.0) || !(self.substep > 0.0) {
            return Err(NavError::InvalidArgument("epoch rate and substep must be positive"));
        }
        if self.duration + 1e-9 < self.vehicle.final_burnout() {
            return Err(NavError::InvalidArgument("duration is shorter than powered flight"));
        }
        Ok(())
    }
}
