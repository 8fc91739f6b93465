use super::Vec3;
use crate::state::StateVector;
#[allow(unused_imports)]
use num_traits::Float;

/// Embeds the planar trajectory on a great circle through the launch site.
///
/// Down-range `x` subtends the angle `x / R` along the launch azimuth and the
/// radius is `R + h`; the velocity splits into the local vertical and the
/// along-track direction of the same great circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchSiteFrame {
    pub latitude: f64,
    pub longitude: f64,
    pub azimuth: f64,
    pub earth_radius: f64,
    up0: Vec3,
    along0: Vec3,
}

/// Derivatives of the embedded position/velocity with respect to the states
/// they depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPartials {
    pub position: Vec3,
    pub velocity: Vec3,
    pub dpos_dx: Vec3,
    pub dpos_dh: Vec3,
    pub dvel_dx: Vec3,
    pub dvel_dv: Vec3,
    pub dvel_dgamma: Vec3,
}

impl LaunchSiteFrame {
    pub fn new(latitude: f64, longitude: f64, azimuth: f64, earth_radius: f64) -> Self {
        let (sl, cl) = latitude.sin_cos();
        let (so, co) = longitude.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        let up0 = Vec3::new(cl * co, cl * so, sl);
        let east = Vec3::new(-so, co, 0.0);
        let north = Vec3::new(-sl * co, -sl * so, cl);
        LaunchSiteFrame { latitude, longitude, azimuth, earth_radius, up0, along0: north * ca + east * sa }
    }

    /// Cape Canaveral, due east.
    pub fn cape_canaveral(earth_radius: f64) -> Self {
        LaunchSiteFrame::new(28.5f64.to_radians(), 279.4f64.to_radians(), 90f64.to_radians(), earth_radius)
    }

    /// Unit vector to the launch site.
    pub fn site_up(&self) -> Vec3 {
        self.up0
    }

    /// Initial along-track unit vector (the launch azimuth direction).
    pub fn site_along(&self) -> Vec3 {
        self.along0
    }

    fn basis(&self, x: f64) -> (Vec3, Vec3) {
        let (st, ct) = (x / self.earth_radius).sin_cos();
        (self.up0 * ct + self.along0 * st, self.along0 * ct - self.up0 * st)
    }

    /// ECEF position and velocity of the vehicle.
    pub fn user_ecef(&self, s: &StateVector) -> (Vec3, Vec3) {
        let (up, along) = self.basis(s.x());
        let (sg, cg) = s.gamma().sin_cos();
        let pos = up * (self.earth_radius + s.h());
        let vel = up * (s.v() * sg) + along * (s.v() * cg);
        (pos, vel)
    }

    pub fn user_partials(&self, s: &StateVector) -> UserPartials {
        let (up, along) = self.basis(s.x());
        let (sg, cg) = s.gamma().sin_cos();
        let v = s.v();
        let r = self.earth_radius + s.h();
        UserPartials {
            position: up * r,
            velocity: up * (v * sg) + along * (v * cg),
            dpos_dx: along * (r / self.earth_radius),
            dpos_dh: up,
            dvel_dx: (along * (v * sg) - up * (v * cg)) / self.earth_radius,
            dvel_dv: up * sg + along * cg,
            dvel_dgamma: up * (v * cg) - along * (v * sg),
        }
    }
}
