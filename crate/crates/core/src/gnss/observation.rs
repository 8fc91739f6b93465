use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::atmosphere::{iono_slant_delay, saastamoinen_tropo, Meteo};
use super::geometry::{elevation, pdop, DEFAULT_ELEVATION_MASK};
use super::{GnssSatellite, LaunchSiteFrame, Vec3};
use crate::state::StateVector;
#[allow(unused_imports)]
use num_traits::Float;

/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// L1 carrier wavelength (m).
pub const CARRIER_WAVELENGTH: f64 = 0.1903;

/// Delay terms are generated on a 2^-20 m grid. Within the [2^24, 2^25) m
/// binade that holds every GPS range from a near-Earth user this makes the
/// iono and ambiguity terms cancel exactly in the GRAPHIC combination.
const DELAY_GRID: f64 = 1_048_576.0;

fn on_grid(x: f64) -> f64 {
    (x * DELAY_GRID).round() / DELAY_GRID
}

/// `lambda N` on the delay grid.
fn ambiguity_offset(n: i64) -> f64 {
    on_grid(CARRIER_WAVELENGTH * n as f64)
}

/// Measurement error model for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    /// Pseudo-range noise standard deviation (m).
    pub sigma_rho: f64,
    /// Carrier-range noise standard deviation (m).
    pub sigma_phi: f64,
    /// Range-rate noise standard deviation (m/s).
    pub sigma_rate: f64,
    /// Vertical ionospheric group delay (m).
    pub iono_zenith: f64,
    pub use_iono: bool,
    pub use_tropo: bool,
    pub meteo: Meteo,
    pub elevation_mask: f64,
    /// Seeds the per-satellite integer ambiguities.
    pub seed: u64,
}

impl Default for ErrorBudget {
    fn default() -> Self {
        ErrorBudget {
            sigma_rho: 5.0,
            sigma_phi: 0.05,
            sigma_rate: 0.2,
            iono_zenith: 5.0,
            use_iono: true,
            use_tropo: true,
            meteo: Meteo::default(),
            elevation_mask: DEFAULT_ELEVATION_MASK,
            seed: 0,
        }
    }
}

impl ErrorBudget {
    /// No noise, no atmosphere.
    pub fn noiseless() -> Self {
        ErrorBudget {
            sigma_rho: 0.0,
            sigma_phi: 0.0,
            sigma_rate: 0.0,
            iono_zenith: 0.0,
            use_iono: false,
            use_tropo: false,
            ..ErrorBudget::default()
        }
    }

    pub fn validate(&self) -> Result<(), crate::NavError> {
        let s = [self.sigma_rho, self.sigma_phi, self.sigma_rate, self.iono_zenith];
        if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(crate::NavError::InvalidArgument("error budget sigmas must be >= 0"));
        }
        Ok(())
    }

    /// Integer ambiguity of satellite `sat`, fixed for the whole run.
    pub fn ambiguity(&self, sat: usize) -> i64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (sat as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.random_range(-100_000..=100_000)
    }
}

/// One tracked satellite in one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRecord {
    pub sat: usize,
    /// Pseudo-range (m).
    pub rho: f64,
    /// Carrier-range including `lambda N` (m).
    pub phi: f64,
    /// Range rate (m/s).
    pub rate: f64,
    /// Integer ambiguity (cycles); truth side, handed to GRAPHIC as resolved.
    pub ambiguity: i64,
    pub elevation: f64,
    pub sat_position: Vec3,
    pub sat_velocity: Vec3,
    /// Satellite clock bias (s), as broadcast.
    pub sat_clock_bias: f64,
    /// Truth metadata.
    pub true_range: f64,
    pub iono: f64,
    pub tropo: f64,
}

/// All channels of one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct GnssObservation {
    pub t: f64,
    pub channels: Vec<ChannelRecord>,
    /// Fewer than four usable channels (or fewer than requested).
    pub degraded: bool,
    /// Receiver altitude used for the atmosphere models (m).
    pub user_altitude: f64,
    pub pdop: Option<f64>,
}

/// Synthesizes pseudo-range, carrier-range and range-rate for the given
/// satellites. Satellites at or below the elevation mask are dropped.
///
/// Noise is drawn from `rng` in channel order as (pseudo-range, carrier,
/// rate), so a fixed seed reproduces the epoch bit for bit.
pub fn synthesize_observation<R: Rng + ?Sized>(
    t: f64,
    s_true: &StateVector,
    sats: &[GnssSatellite],
    budget: &ErrorBudget,
    frame: &LaunchSiteFrame,
    rng: &mut R,
) -> GnssObservation {
    let (user_pos, user_vel) = frame.user_ecef(s_true);
    let h = s_true.h().max(0.0);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut channels = Vec::with_capacity(sats.len());
    for sat in sats {
        let el = elevation(&user_pos, &sat.position);
        if !(el > budget.elevation_mask) {
            continue;
        }
        let los = sat.position - user_pos;
        let r = los.norm();
        let u = los / r;
        let tropo = if budget.use_tropo { saastamoinen_tropo(el, h, &budget.meteo).unwrap_or(0.0) } else { 0.0 };
        let iono = if budget.use_iono {
            on_grid(iono_slant_delay(budget.iono_zenith, el, h, frame.earth_radius))
        } else {
            0.0
        };
        let n = budget.ambiguity(sat.index);
        let e_rho = budget.sigma_rho * std_normal.sample(rng);
        let e_phi = budget.sigma_phi * std_normal.sample(rng);
        let e_rate = budget.sigma_rate * std_normal.sample(rng);

        let base = r + s_true.b() - SPEED_OF_LIGHT * sat.clock_bias + tropo;
        let rho = (base + iono) + e_rho;
        let phi = ((base - iono) + ambiguity_offset(n)) + e_phi;
        let rate = (sat.velocity - user_vel).dot(&u) + s_true.b_dot() + e_rate;
        channels.push(ChannelRecord {
            sat: sat.index,
            rho,
            phi,
            rate,
            ambiguity: n,
            elevation: el,
            sat_position: sat.position,
            sat_velocity: sat.velocity,
            sat_clock_bias: sat.clock_bias,
            true_range: r,
            iono,
            tropo,
        });
    }
    let positions: Vec<Vec3> = channels.iter().map(|c| c.sat_position).collect();
    let pdop = pdop(&positions, &user_pos).ok();
    GnssObservation { t, degraded: channels.len() < 4, channels, user_altitude: h, pdop }
}

/// GRAPHIC half-sum of pseudo-range and ambiguity-corrected carrier-range.
pub fn graphic_combine(rho: f64, phi: f64, ambiguity: i64) -> f64 {
    (rho + (phi - ambiguity_offset(ambiguity))) * 0.5
}

/// Filter-ready channel: corrected range and range rate plus the satellite
/// state used to predict them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementChannel {
    pub sat: usize,
    pub sat_position: Vec3,
    pub sat_velocity: Vec3,
    /// Range with iono removed (GRAPHIC), tropo model and satellite clock
    /// corrected: ideally `r + b`.
    pub range: f64,
    /// Ideally line-of-sight rate + `b_dot`.
    pub range_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEpoch {
    pub t: f64,
    pub channels: Vec<MeasurementChannel>,
    pub degraded: bool,
    pub pdop: Option<f64>,
}

/// Receiver-side corrections: GRAPHIC (when `use_graphic`), Saastamoinen
/// model at the reported elevation when the budget includes troposphere, and
/// the broadcast satellite clock.
pub fn preprocess(obs: &GnssObservation, budget: &ErrorBudget, use_graphic: bool) -> MeasurementEpoch {
    let channels = obs
        .channels
        .iter()
        .map(|c| {
            let mut range = if use_graphic { graphic_combine(c.rho, c.phi, c.ambiguity) } else { c.rho };
            if budget.use_tropo {
                range -= saastamoinen_tropo(c.elevation, obs.user_altitude, &budget.meteo).unwrap_or(0.0);
            }
            range += SPEED_OF_LIGHT * c.sat_clock_bias;
            MeasurementChannel {
                sat: c.sat,
                sat_position: c.sat_position,
                sat_velocity: c.sat_velocity,
                range,
                range_rate: c.rate,
            }
        })
        .collect();
    MeasurementEpoch { t: obs.t, channels, degraded: obs.degraded, pdop: obs.pdop }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnss::{constellation_at, visible_satellites, Almanac};
    use approx::assert_relative_eq;

    fn setup(b: f64) -> (StateVector, Vec<GnssSatellite>, LaunchSiteFrame) {
        let frame = LaunchSiteFrame::cape_canaveral(6_378_137.0);
        let s = StateVector::new(1000.0, 2000.0, 300.0, 1.2, 4e5, 0.5, b, 2.0);
        let (pos, _) = frame.user_ecef(&s);
        let sats = visible_satellites(&constellation_at(0.0, &Almanac::default()), &pos, DEFAULT_ELEVATION_MASK)
            .into_iter()
            .map(|(s, _)| s)
            .collect();
        (s, sats, frame)
    }

    #[test]
    fn noiseless_is_geometric_range() {
        let (s, sats, frame) = setup(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = synthesize_observation(0.0, &s, &sats, &ErrorBudget::noiseless(), &frame, &mut rng);
        assert!(obs.channels.len() >= 4);
        for c in &obs.channels {
            assert_eq!(c.rho, c.true_range);
            assert!(c.rho > 1.9e7);
        }
    }

    #[test]
    fn clock_bias_offsets_every_channel() {
        let (s, sats, frame) = setup(400.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = synthesize_observation(0.0, &s, &sats, &ErrorBudget::noiseless(), &frame, &mut rng);
        for c in &obs.channels {
            assert_relative_eq!(c.rho - c.true_range, 400.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn iono_sign_convention() {
        let (s, sats, frame) = setup(400.0);
        let budget = ErrorBudget { iono_zenith: 5.0, use_iono: true, ..ErrorBudget::noiseless() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = synthesize_observation(0.0, &s, &sats, &budget, &frame, &mut rng);
        for c in &obs.channels {
            let lambda_n = ambiguity_offset(c.ambiguity);
            assert_eq!(c.rho - c.phi + lambda_n, 2.0 * c.iono);
            assert!(c.iono >= 5.0);
        }
    }

    #[test]
    fn graphic_cancels_symmetric_iono() {
        let r = 21_234_567.891_234;
        let i = on_grid(5.0);
        let n = 12_345;
        let out = graphic_combine(r + i, (r - i) + ambiguity_offset(n), n);
        assert_eq!(out, r);
        assert_eq!(graphic_combine(r, r + ambiguity_offset(n), n), r);
    }

    #[test]
    fn rate_includes_clock_drift() {
        let (s, sats, frame) = setup(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = synthesize_observation(0.0, &s, &sats, &ErrorBudget::noiseless(), &frame, &mut rng);
        let (p, v) = frame.user_ecef(&s);
        for c in &obs.channels {
            let u = (c.sat_position - p).normalize();
            assert_relative_eq!(c.rate, (c.sat_velocity - v).dot(&u) + 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn mask_drops_low_satellites() {
        let (s, _, frame) = setup(0.0);
        let all = constellation_at(0.0, &Almanac::default());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let obs = synthesize_observation(0.0, &s, &all, &ErrorBudget::default(), &frame, &mut rng);
        assert!(obs.channels.len() < all.len());
        assert!(obs.channels.iter().all(|c| c.elevation > DEFAULT_ELEVATION_MASK));
    }
}
