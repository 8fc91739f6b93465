//! Monte Carlo harness, CSV formats and configuration files for the
//! launch-vehicle GNSS navigation filters of `ascent-nav-core`.

pub mod bench;
pub mod campaign;
pub mod config;
pub mod export;
pub mod stats;
