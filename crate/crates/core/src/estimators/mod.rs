//! EKF, UKF, SPUKF and ESPUKF over the shared ascent and GNSS models.
//!
//! All four filters propagate the mean with one RK4 trajectory integration
//! except the UKF, which integrates every sigma point. The single-propagation
//! variants rebuild the remaining sigma points from the propagated mean and a
//! linear map of each point's offset: `exp(J dt)` for the SPUKF and a
//! Richardson combination of one full step and two half steps for the ESPUKF.

mod belief;
mod measurement;
pub mod order;
mod predict;
mod run;
mod sigma;
mod update;

pub use belief::{ensure_positive_definite, GaussianBelief, Repair};
pub use measurement::{MeasurementConfig, MeasurementMode};
pub use predict::{ekf_predict, espukf_predict, espukf_transition, predict, spukf_predict, ukf_predict, Prediction};
pub use run::{position_error, run_filter, EpochRecord, FilterRun, FilterStepTiming, NoClock, StepClock};
pub use sigma::{generate_sigma_points, SigmaPointSet, UtParams, SIGMA_COUNT};
pub use update::{kalman_update, sigma_point_update, Innovation};

use core::fmt;
use core::str::FromStr;

/// The four filter variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterKind {
    Ekf,
    Ukf,
    Spukf,
    Espukf,
}

impl FilterKind {
    pub const ALL: [FilterKind; 4] = [FilterKind::Ekf, FilterKind::Ukf, FilterKind::Spukf, FilterKind::Espukf];

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Ekf => "EKF",
            FilterKind::Ukf => "UKF",
            FilterKind::Spukf => "SPUKF",
            FilterKind::Espukf => "ESPUKF",
        }
    }

    pub fn uses_sigma_points(self) -> bool {
        self != FilterKind::Ekf
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = crate::NavError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ekf" => Ok(FilterKind::Ekf),
            "ukf" => Ok(FilterKind::Ukf),
            "spukf" => Ok(FilterKind::Spukf),
            "espukf" => Ok(FilterKind::Espukf),
            _ => Err(crate::NavError::InvalidArgument("unknown filter kind")),
        }
    }
}
