use nalgebra::{DVector, Dyn, OMatrix, U8};

use crate::gnss::{LaunchSiteFrame, MeasurementEpoch, Vec3};
use crate::state::{idx, StateVector};

/// `dim(z) x 8` measurement Jacobian.
pub type MeasurementJacobian = OMatrix<f64, Dyn, U8>;

/// Which observables enter the filter update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Pseudo-range only.
    Range,
    /// Pseudo-range and range rate.
    RangeRate,
}

/// Filter-side measurement model: predicted range `r_i + b` and range rate
/// `(v_sat - v_user) . u_i + b_dot` for every channel, ranges first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementConfig {
    pub frame: LaunchSiteFrame,
    pub mode: MeasurementMode,
    /// Standard deviation of the preprocessed range (m).
    pub sigma_range: f64,
    /// Standard deviation of the range rate (m/s).
    pub sigma_rate: f64,
}

impl MeasurementConfig {
    pub fn rows_per_channel(&self) -> usize {
        match self.mode {
            MeasurementMode::Range => 1,
            MeasurementMode::RangeRate => 2,
        }
    }

    pub fn dimension(&self, epoch: &MeasurementEpoch) -> usize {
        epoch.channels.len() * self.rows_per_channel()
    }

    pub fn observed(&self, epoch: &MeasurementEpoch) -> DVector<f64> {
        let k = epoch.channels.len();
        let mut z = DVector::zeros(self.dimension(epoch));
        for (i, c) in epoch.channels.iter().enumerate() {
            z[i] = c.range;
            if self.mode == MeasurementMode::RangeRate {
                z[k + i] = c.range_rate;
            }
        }
        z
    }

    /// Writes the predicted measurement into `out` (length = dimension).
    pub fn predict_into(&self, s: &StateVector, epoch: &MeasurementEpoch, out: &mut [f64]) {
        let (pos, vel) = self.frame.user_ecef(s);
        let k = epoch.channels.len();
        for (i, c) in epoch.channels.iter().enumerate() {
            let los = c.sat_position - pos;
            let r = los.norm();
            out[i] = r + s.b();
            if self.mode == MeasurementMode::RangeRate {
                out[k + i] = (c.sat_velocity - vel).dot(&los) / r + s.b_dot();
            }
        }
    }

    pub fn predict(&self, s: &StateVector, epoch: &MeasurementEpoch) -> DVector<f64> {
        let mut out = DVector::zeros(self.dimension(epoch));
        self.predict_into(s, epoch, out.as_mut_slice());
        out
    }

    /// Analytic measurement Jacobian (rows as in [`Self::predict`]).
    pub fn jacobian(&self, s: &StateVector, epoch: &MeasurementEpoch) -> MeasurementJacobian {
        let p = self.frame.user_partials(s);
        let k = epoch.channels.len();
        let mut h = MeasurementJacobian::zeros(self.dimension(epoch));
        for (i, c) in epoch.channels.iter().enumerate() {
            let los = c.sat_position - p.position;
            let r = los.norm();
            let u: Vec3 = los / r;
            h[(i, idx::X)] = -u.dot(&p.dpos_dx);
            h[(i, idx::H)] = -u.dot(&p.dpos_dh);
            h[(i, idx::B)] = 1.0;
            if self.mode == MeasurementMode::RangeRate {
                let rel = c.sat_velocity - p.velocity;
                // d(rate)/d(user position) = -(rel - (rel.u) u) / r
                let dpos: Vec3 = -(rel - u * rel.dot(&u)) / r;
                h[(k + i, idx::X)] = dpos.dot(&p.dpos_dx) - u.dot(&p.dvel_dx);
                h[(k + i, idx::H)] = dpos.dot(&p.dpos_dh);
                h[(k + i, idx::V)] = -u.dot(&p.dvel_dv);
                h[(k + i, idx::GAMMA)] = -u.dot(&p.dvel_dgamma);
                h[(k + i, idx::B_DOT)] = 1.0;
            }
        }
        h
    }

    /// Diagonal of the measurement noise covariance.
    pub fn noise_diagonal(&self, epoch: &MeasurementEpoch) -> DVector<f64> {
        let k = epoch.channels.len();
        let mut r = DVector::from_element(self.dimension(epoch), self.sigma_range * self.sigma_range);
        if self.mode == MeasurementMode::RangeRate {
            for i in 0..k {
                r[k + i] = self.sigma_rate * self.sigma_rate;
            }
        }
        r
    }
}
