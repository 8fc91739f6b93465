#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;

use crate::dynamics::DEFAULT_SUBSTEP;
use crate::estimators::{GaussianBelief, MeasurementMode, UtParams};
use crate::gnss::{Almanac, ErrorBudget, LaunchSiteFrame};
use crate::state::{Matrix8, StateVector, Vector8};
use crate::vehicle::{Environment, ProcessNoise, StageParams, VehicleConfig};

use super::ScenarioConfig;

/// X(0): on the pad, nearly vertical, 520 t, clock 400 m drifting 2 m/s.
/// The flight path angle is the published four-digit value, not pi/2.
#[allow(clippy::approx_constant)]
pub const CRS5_INITIAL_STATE: [f64; 8] = [0.0, 0.0, 5.6543, 1.5708, 5.20e5, 0.5010, 400.0, 2.0];

/// Diagonal of P(0).
pub const CRS5_INITIAL_COVARIANCE: [f64; 8] = [1.0, 1.0, 0.01, 1e-6, 9.0, 0.01, 9e4, 25.0];

/// Falcon 9 v1.1 as flown on CRS-5.
pub fn crs5_vehicle() -> VehicleConfig {
    VehicleConfig {
        stages: vec![
            StageParams {
                inert_mass: 23_100.0,
                propellant_mass: 395_700.0,
                thrust: 5_886e3,
                isp: 282.0,
                burn_duration: 187.0,
            },
            StageParams {
                inert_mass: 3_900.0,
                propellant_mass: 92_670.0,
                thrust: 801e3,
                isp: 340.0,
                burn_duration: 386.0,
            },
        ],
        payload_mass: 2_317.0,
        spacecraft_mass: 4_200.0,
        frontal_area: core::f64::consts::PI * (3.66f64 / 2.0).powi(2),
        pitch_kick_time: 10.0,
        pitch_kick_angle: 1e-4,
    }
}

/// The CRS-5 scenario with default error budget, 6 channels, 1 Hz
/// measurements from liftoff to second-stage burnout.
pub fn build_crs5() -> ScenarioConfig {
    let env = Environment::default();
    let vehicle = crs5_vehicle();
    let duration = vehicle.final_burnout();
    ScenarioConfig {
        vehicle,
        environment: env,
        budget: ErrorBudget::default(),
        almanac: Almanac::default(),
        site: LaunchSiteFrame::cape_canaveral(env.earth_radius),
        channels: 6,
        epoch_rate: 1.0,
        duration,
        mode: MeasurementMode::RangeRate,
        use_graphic: true,
        ut: UtParams::default(),
        init: GaussianBelief::new(
            StateVector(Vector8::from(CRS5_INITIAL_STATE)),
            Matrix8::from_diagonal(&Vector8::from(CRS5_INITIAL_COVARIANCE)),
        ),
        process_noise: ProcessNoise::isotropic(1e-30),
        truth_clock_bias: 400.0,
        truth_clock_drift: 2.0,
        substep: DEFAULT_SUBSTEP,
        seed: 2015,
        perturb_initial_estimate: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let cfg = build_crs5();
        assert_eq!(cfg.vehicle.stages.len(), 2);
        assert_eq!(cfg.init.cov[(2, 2)], 0.01);
        let stack: f64 = 23_100.0 + 395_700.0 + 3_900.0 + 92_670.0 + 4_200.0;
        assert_eq!(stack, 519_570.0);
        assert!((stack / 5.20e5 - 1.0).abs() < 1e-3);
        assert!((cfg.vehicle.frontal_area - 10.52).abs() < 0.01);
        assert_eq!(cfg.duration, 573.0);
        cfg.validate().unwrap();
    }
}
