use alloc::vec::Vec;

use super::Vec3;
#[allow(unused_imports)]
use num_traits::Float;

/// Earth gravitational parameter (m^3/s^2).
pub const GM_EARTH: f64 = 3.986004418e14;

/// Circular Walker-style constellation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Almanac {
    pub planes: usize,
    pub slots_per_plane: usize,
    /// Extra satellites per plane, spread evenly between the first slots
    /// (the operational constellation flies spares beyond the 24 slots).
    pub spares_per_plane: usize,
    /// Orbit radius (m).
    pub semi_major_axis: f64,
    pub inclination: f64,
    pub mu: f64,
    /// Argument-of-latitude offset between adjacent planes (rad).
    pub inter_plane_phase: f64,
    /// Time shift applied to every orbit (s), selects the geometry at t = 0.
    pub epoch_offset: f64,
    /// Per-satellite clock bias (s); missing entries are zero.
    pub clock_biases: Vec<f64>,
}

impl Default for Almanac {
    fn default() -> Self {
        Almanac {
            planes: 6,
            slots_per_plane: 4,
            spares_per_plane: 1,
            semi_major_axis: 26_560_000.0,
            inclination: 55f64.to_radians(),
            mu: GM_EARTH,
            inter_plane_phase: 15f64.to_radians(),
            epoch_offset: 0.0,
            clock_biases: Vec::new(),
        }
    }
}

impl Almanac {
    pub fn satellite_count(&self) -> usize {
        self.planes * self.sats_per_plane()
    }

    pub fn sats_per_plane(&self) -> usize {
        self.slots_per_plane + self.spares_per_plane
    }

    /// Argument of latitude at the almanac epoch of satellite `k` of plane
    /// `p` (slots first, then spares at half-slot offsets).
    fn initial_latitude(&self, p: usize, k: usize) -> f64 {
        let tau = 2.0 * core::f64::consts::PI;
        let spacing = tau / self.slots_per_plane as f64;
        let along = if k < self.slots_per_plane {
            spacing * k as f64
        } else {
            let j = k - self.slots_per_plane;
            spacing * (j as f64 * self.slots_per_plane as f64 / self.spares_per_plane as f64).floor() + 0.5 * spacing
        };
        along + self.inter_plane_phase * p as f64
    }

    pub fn mean_motion(&self) -> f64 {
        (self.mu / self.semi_major_axis.powi(3)).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.mean_motion()
    }
}

/// One navigation satellite at an instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnssSatellite {
    pub index: usize,
    pub position: Vec3,
    pub velocity: Vec3,
    /// Satellite clock bias (s).
    pub clock_bias: f64,
}

/// Two-body positions and velocities of every satellite at time `t`.
pub fn constellation_at(t: f64, almanac: &Almanac) -> Vec<GnssSatellite> {
    let n = almanac.mean_motion();
    let a = almanac.semi_major_axis;
    let (sin_i, cos_i) = almanac.inclination.sin_cos();
    let tau = 2.0 * core::f64::consts::PI;
    let mut sats = Vec::with_capacity(almanac.satellite_count());
    for p in 0..almanac.planes {
        let raan = tau * p as f64 / almanac.planes as f64;
        let (sin_o, cos_o) = raan.sin_cos();
        for k in 0..almanac.sats_per_plane() {
            let index = p * almanac.sats_per_plane() + k;
            let u = almanac.initial_latitude(p, k) + n * (t + almanac.epoch_offset);
            let (sin_u, cos_u) = u.sin_cos();
            // in-plane -> inclined -> RAAN-rotated
            let (xp, yp) = (a * cos_u, a * sin_u);
            let (vxp, vyp) = (-a * n * sin_u, a * n * cos_u);
            let rot = |x: f64, y: f64| {
                let (xi, yi, zi) = (x, y * cos_i, y * sin_i);
                Vec3::new(cos_o * xi - sin_o * yi, sin_o * xi + cos_o * yi, zi)
            };
            sats.push(GnssSatellite {
                index,
                position: rot(xp, yp),
                velocity: rot(vxp, vyp),
                clock_bias: almanac.clock_biases.get(index).copied().unwrap_or(0.0),
            });
        }
    }
    sats
}
