//! Synthetic GPS: constellation, trajectory embedding, observables, error
//! models and geometry.

mod atmosphere;
mod constellation;
mod frame;
mod geometry;
mod observation;

pub use atmosphere::{iono_slant_delay, saastamoinen_tropo, Meteo, IONO_SHELL_HEIGHT, TROPO_CEILING};
pub use constellation::{constellation_at, Almanac, GnssSatellite, GM_EARTH};
pub use frame::{LaunchSiteFrame, UserPartials};
pub use geometry::{
    elevation, least_squares_fix, pdop, select_channels, true_range, visible_satellites, PointFix,
    DEFAULT_ELEVATION_MASK,
};
pub use observation::{
    graphic_combine, preprocess, synthesize_observation, ChannelRecord, ErrorBudget, GnssObservation,
    MeasurementChannel, MeasurementEpoch, CARRIER_WAVELENGTH, SPEED_OF_LIGHT,
};

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;
