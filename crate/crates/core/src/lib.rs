//! Launch-ascent navigation core.
//!
//! An 8-state point-mass ascent model (down-range, altitude, speed, flight path
//! angle, mass, aerodynamic coefficient, receiver clock bias and drift), a
//! synthetic GPS observable generator, and four nonlinear filters sharing the
//! same models: EKF, UKF, and the single-propagation variants SPUKF and ESPUKF.
//!
//! The crate is `no_std` and only needs `alloc`. Wall-clock timing, file
//! formats and the Monte Carlo runner live in the `ascent-nav` crate.

#![no_std]
// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod expm;
pub mod gnss;
pub mod linalg;
pub mod scenario;
pub mod state;
pub mod vehicle;

pub use error::NavError;
pub use state::{Matrix8, StateVector, Vector8, STATE_DIM};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, NavError>;
