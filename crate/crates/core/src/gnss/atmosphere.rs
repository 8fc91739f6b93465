use crate::error::NavError;
#[allow(unused_imports)]
use num_traits::Float;

/// Surface meteorology for the Saastamoinen zenith delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meteo {
    /// Total pressure (hPa).
    pub pressure: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Partial water-vapour pressure (hPa).
    pub vapour_pressure: f64,
}

impl Default for Meteo {
    fn default() -> Self {
        Meteo { pressure: 1013.25, temperature: 291.15, vapour_pressure: 11.75 }
    }
}

/// Above this altitude the tropospheric delay is zero (m).
pub const TROPO_CEILING: f64 = 86_000.0;
/// Pressure and vapour scale heights used to lift the surface values (m).
const DRY_SCALE_HEIGHT: f64 = 8_000.0;
const WET_SCALE_HEIGHT: f64 = 2_000.0;

/// Default elevation mask (rad).
const MASK: f64 = 5.0 * core::f64::consts::PI / 180.0;

/// Slant tropospheric delay (m) for a receiver at altitude `h`.
///
/// Saastamoinen zenith delay `0.002277 (P + (1255/T + 0.05) e)` with the
/// surface pressure and vapour pressure decayed exponentially with altitude,
/// mapped by `1 / sin(elevation)`.
pub fn saastamoinen_tropo(elevation: f64, h: f64, meteo: &Meteo) -> Result<f64, NavError> {
    if !(elevation > MASK) || elevation > core::f64::consts::FRAC_PI_2 + 1e-12 {
        return Err(NavError::BelowElevationMask { elevation });
    }
    if !(h >= 0.0) {
        return Err(NavError::InvalidArgument("tropospheric delay needs h >= 0"));
    }
    if h > TROPO_CEILING {
        return Ok(0.0);
    }
    let p = meteo.pressure * (-h / DRY_SCALE_HEIGHT).exp();
    let e = meteo.vapour_pressure * (-h / WET_SCALE_HEIGHT).exp();
    let zenith = 0.002277 * (p + (1255.0 / meteo.temperature + 0.05) * e);
    Ok(zenith / elevation.sin())
}

/// Thin-shell height for the ionospheric obliquity factor (m).
pub const IONO_SHELL_HEIGHT: f64 = 350_000.0;

/// Slant ionospheric group delay (m) for a receiver at altitude `h`: the
/// zenith delay times the thin-shell obliquity factor, and zero once the
/// receiver is above the shell.
pub fn iono_slant_delay(zenith_delay: f64, elevation: f64, h: f64, earth_radius: f64) -> f64 {
    if zenith_delay == 0.0 || h >= IONO_SHELL_HEIGHT {
        return 0.0;
    }
    let ratio = (earth_radius + h) / (earth_radius + IONO_SHELL_HEIGHT) * elevation.cos();
    zenith_delay / (1.0 - ratio * ratio).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zenith_at_sea_level() {
        // hand evaluation: 0.002277 * (1013.25 + (1255/291.15 + 0.05) * 11.75)
        let oracle = 0.002277 * (1013.25 + (4.310493 + 0.05) * 11.75);
        let d = saastamoinen_tropo(core::f64::consts::FRAC_PI_2, 0.0, &Meteo::default()).unwrap();
        assert_relative_eq!(d, oracle, max_relative = 1e-6);
        assert!((2.3..2.45).contains(&d), "{d}");
    }

    #[test]
    fn mapping_and_ceiling() {
        let m = Meteo::default();
        let z = saastamoinen_tropo(core::f64::consts::FRAC_PI_2, 0.0, &m).unwrap();
        let d30 = saastamoinen_tropo(30f64.to_radians(), 0.0, &m).unwrap();
        assert!((d30 / (2.0 * z) - 1.0).abs() < 0.05);
        assert_eq!(saastamoinen_tropo(0.5, 86_001.0, &m).unwrap(), 0.0);
        let high = saastamoinen_tropo(core::f64::consts::FRAC_PI_2, 80_000.0, &m).unwrap();
        assert!(high > 0.0 && high < 1e-3);
    }

    #[test]
    fn below_mask_rejected() {
        assert!(saastamoinen_tropo(4f64.to_radians(), 0.0, &Meteo::default()).is_err());
        assert!(saastamoinen_tropo(5f64.to_radians(), 0.0, &Meteo::default()).is_err());
    }

    #[test]
    fn iono_obliquity() {
        let re = 6_378_137.0;
        assert_relative_eq!(iono_slant_delay(5.0, core::f64::consts::FRAC_PI_2, 0.0, re), 5.0, epsilon = 1e-12);
        let low = iono_slant_delay(5.0, 10f64.to_radians(), 0.0, re);
        assert!(low > 2.5 * 5.0 && low < 3.1 * 5.0, "{low}");
        assert_eq!(iono_slant_delay(5.0, 1.0, 400e3, re), 0.0);
    }
}
