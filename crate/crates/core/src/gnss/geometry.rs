use alloc::vec::Vec;

use nalgebra::{Matrix4, Vector4};

use super::{GnssSatellite, Vec3};
use crate::error::NavError;
use crate::linalg::cholesky_in_place;
#[allow(unused_imports)]
use num_traits::Float;

/// Default elevation mask (rad).
pub const DEFAULT_ELEVATION_MASK: f64 = 5.0 * core::f64::consts::PI / 180.0;

/// Euclidean distance between a user and a satellite position.
pub fn true_range(user: &Vec3, sat: &GnssSatellite) -> f64 {
    (sat.position - user).norm()
}

/// Elevation of `sat` above the geocentric horizon of `user`.
pub fn elevation(user: &Vec3, sat: &Vec3) -> f64 {
    let los = (sat - user).normalize();
    let up = user.normalize();
    los.dot(&up).clamp(-1.0, 1.0).asin()
}

/// Satellites strictly above `mask`, paired with their elevations, in input
/// order.
pub fn visible_satellites(sats: &[GnssSatellite], user: &Vec3, mask: f64) -> Vec<(GnssSatellite, f64)> {
    sats.iter().map(|s| (*s, elevation(user, &s.position))).filter(|(_, el)| *el > mask).collect()
}

/// The `k` highest-elevation satellites, ties broken by ascending index.
pub fn select_channels(visible: &[GnssSatellite], k: usize, user: &Vec3) -> Result<Vec<GnssSatellite>, NavError> {
    if k > visible.len() {
        return Err(NavError::InsufficientSatellites { visible: visible.len(), requested: k });
    }
    let mut ranked: Vec<(f64, GnssSatellite)> = visible.iter().map(|s| (elevation(user, &s.position), *s)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.index.cmp(&b.1.index)));
    Ok(ranked.into_iter().take(k).map(|(_, s)| s).collect())
}

fn geometry_normal(sat_positions: &[Vec3], user: &Vec3) -> Matrix4<f64> {
    let mut n = Matrix4::zeros();
    for p in sat_positions {
        let u = (p - user).normalize();
        let row = Vector4::new(-u.x, -u.y, -u.z, 1.0);
        n += row * row.transpose();
    }
    n
}

/// Position dilution of precision for unit-weight ranges.
pub fn pdop(sat_positions: &[Vec3], user: &Vec3) -> Result<f64, NavError> {
    if sat_positions.len() < 4 {
        return Err(NavError::InsufficientSatellites { visible: sat_positions.len(), requested: 4 });
    }
    let n = geometry_normal(sat_positions, user);
    let mut l = n;
    cholesky_in_place(l.as_mut_slice(), 4).map_err(|_| NavError::SingularGeometry)?;
    let min_pivot = (0..4).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    if min_pivot < 1e-10 * n.diagonal().max() {
        return Err(NavError::SingularGeometry);
    }
    let inv = n.try_inverse().ok_or(NavError::SingularGeometry)?;
    let trace = inv[(0, 0)] + inv[(1, 1)] + inv[(2, 2)];
    Ok(trace.sqrt())
}

/// Iterative least-squares position and clock solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFix {
    pub position: Vec3,
    /// Receiver clock bias (m).
    pub clock: f64,
    pub iterations: usize,
}

/// Gauss-Newton solution of `range_i = |sat_i - p| + b` from `initial`.
pub fn least_squares_fix(sat_positions: &[Vec3], ranges: &[f64], initial: Vec3) -> Result<PointFix, NavError> {
    if sat_positions.len() != ranges.len() {
        return Err(NavError::InvalidArgument("satellite and range counts differ"));
    }
    if ranges.len() < 4 {
        return Err(NavError::InsufficientSatellites { visible: ranges.len(), requested: 4 });
    }
    let mut pos = initial;
    let mut clock = 0.0;
    for it in 1..=20 {
        let mut normal = Matrix4::zeros();
        let mut rhs = Vector4::zeros();
        for (p, &rho) in sat_positions.iter().zip(ranges) {
            let d = p - pos;
            let r = d.norm();
            let u = d / r;
            let row = Vector4::new(-u.x, -u.y, -u.z, 1.0);
            normal += row * row.transpose();
            rhs += row * (rho - (r + clock));
        }
        let delta = normal.lu().solve(&rhs).ok_or(NavError::SingularGeometry)?;
        pos += Vec3::new(delta[0], delta[1], delta[2]);
        clock += delta[3];
        if delta.norm() < 1e-9 {
            return Ok(PointFix { position: pos, clock, iterations: it });
        }
    }
    Ok(PointFix { position: pos, clock, iterations: 20 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sat(index: usize, p: Vec3) -> GnssSatellite {
        GnssSatellite { index, position: p, velocity: Vec3::zeros(), clock_bias: 0.0 }
    }

    #[test]
    fn ranges() {
        let s = sat(0, Vec3::new(26_560e3, 0.0, 0.0));
        assert_eq!(true_range(&Vec3::zeros(), &s), 26_560e3);
        let user = Vec3::new(6_378_137.0, 0.0, 0.0);
        assert_eq!(true_range(&user, &s), 20_181_863.0);
        let swapped = sat(1, user);
        assert_eq!(true_range(&s.position, &swapped), 20_181_863.0);
    }

    #[test]
    fn tetrahedron_pdop() {
        // four unit directions at the vertices of a regular tetrahedron
        let dirs = [
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ];
        let user = Vec3::zeros();
        let pos: Vec<Vec3> = dirs.iter().map(|d| d.normalize() * 2e7).collect();
        // oracle: direct inversion of G^T G, G rows [-u, 1]
        let mut g = nalgebra::Matrix4::zeros();
        for (i, d) in dirs.iter().enumerate() {
            let u = d.normalize();
            g.set_row(i, &nalgebra::RowVector4::new(-u.x, -u.y, -u.z, 1.0));
        }
        let inv = (g.transpose() * g).try_inverse().unwrap();
        let oracle = (inv[(0, 0)] + inv[(1, 1)] + inv[(2, 2)]).sqrt();
        let p = pdop(&pos, &user).unwrap();
        assert_relative_eq!(p, oracle, max_relative = 1e-12);
        assert_relative_eq!(p, 1.5, max_relative = 1e-9);
    }

    #[test]
    fn collinear_geometry_is_singular() {
        let pos = [
            Vec3::new(2e7, 0.0, 0.0),
            Vec3::new(2.1e7, 0.0, 0.0),
            Vec3::new(2.2e7, 0.0, 0.0),
            Vec3::new(2.3e7, 0.0, 0.0),
        ];
        assert_eq!(pdop(&pos, &Vec3::zeros()), Err(NavError::SingularGeometry));
    }

    #[test]
    fn selection_orders_by_elevation_then_index() {
        let user = Vec3::new(6_378_137.0, 0.0, 0.0);
        let sats = [
            sat(3, Vec3::new(2.6e7, 1e6, 0.0)),
            sat(1, Vec3::new(2.0e7, 1.5e7, 0.0)),
            sat(2, Vec3::new(2.6e7, -1e6, 0.0)),
            sat(0, Vec3::new(2.6e7, 0.0, 0.0)),
        ];
        let chosen = select_channels(&sats, 3, &user).unwrap();
        let ids: Vec<usize> = chosen.iter().map(|s| s.index).collect();
        assert_eq!(ids, [0, 2, 3]);
        assert_eq!(select_channels(&sats, 4, &user).unwrap().len(), 4);
        assert_eq!(
            select_channels(&sats, 5, &user),
            Err(NavError::InsufficientSatellites { visible: 4, requested: 5 })
        );
    }
}
