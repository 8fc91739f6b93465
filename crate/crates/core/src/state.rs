//! The estimated state and its fixed component ordering.

use nalgebra::{SMatrix, SVector};

use crate::error::NavError;

pub const STATE_DIM: usize = 8;

pub type Vector8 = SVector<f64, STATE_DIM>;
pub type Matrix8 = SMatrix<f64, STATE_DIM, STATE_DIM>;

/// Component indices.
pub mod idx {
    pub const X: usize = 0;
    pub const H: usize = 1;
    pub const V: usize = 2;
    pub const GAMMA: usize = 3;
    pub const M: usize = 4;
    pub const C: usize = 5;
    pub const B: usize = 6;
    pub const B_DOT: usize = 7;
}

/// Vehicle state: down-range x (m), altitude h (m), speed v (m/s), flight path
/// angle gamma (rad), mass m (kg), aerodynamic coefficient C, receiver clock
/// bias b (m) and clock bias rate b_dot (m/s), in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub Vector8);

impl StateVector {
    #[allow(clippy::too_many_arguments)]
    pub fn new(x: f64, h: f64, v: f64, gamma: f64, m: f64, c: f64, b: f64, b_dot: f64) -> Self {
        StateVector(Vector8::from([x, h, v, gamma, m, c, b, b_dot]))
    }

    pub fn x(&self) -> f64 {
        self.0[idx::X]
    }
    pub fn h(&self) -> f64 {
        self.0[idx::H]
    }
    pub fn v(&self) -> f64 {
        self.0[idx::V]
    }
    pub fn gamma(&self) -> f64 {
        self.0[idx::GAMMA]
    }
    pub fn m(&self) -> f64 {
        self.0[idx::M]
    }
    pub fn c(&self) -> f64 {
        self.0[idx::C]
    }
    pub fn b(&self) -> f64 {
        self.0[idx::B]
    }
    pub fn b_dot(&self) -> f64 {
        self.0[idx::B_DOT]
    }

    pub fn as_vector(&self) -> &Vector8 {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Rejects non-finite components.
    pub fn check_finite(&self) -> Result<(), NavError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(NavError::NonFinite { what: "state vector" })
        }
    }
}

impl From<Vector8> for StateVector {
    fn from(v: Vector8) -> Self {
        StateVector(v)
    }
}
