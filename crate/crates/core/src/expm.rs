//! Matrix exponential by scaling and squaring with a truncated Taylor series.

use nalgebra::SMatrix;

use crate::error::NavError;
use crate::state::Matrix8;
#[allow(unused_imports)]
use num_traits::Float;

/// The scaled argument is brought below this 1-norm before the series.
const SCALED_NORM: f64 = 0.5;
const MAX_TERMS: usize = 30;

fn norm1<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Power-of-two diagonal similarity `d` (Parlett–Reinsch sweeps) such that
/// `b[(i, j)] = a[(i, j)] * d[j] / d[i]` has balanced off-diagonal row and
/// column norms. Scaling by powers of two is exact.
fn balance<const N: usize>(a: &SMatrix<f64, N, N>) -> (SMatrix<f64, N, N>, [f64; N]) {
    let mut b = *a;
    let mut d = [1.0; N];
    for _ in 0..4 {
        let mut changed = false;
        for i in 0..N {
            let (mut c, mut r) = (0.0, 0.0);
            for k in 0..N {
                if k != i {
                    c += b[(k, i)].abs();
                    r += b[(i, k)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            while c * f * f < 0.5 * r {
                f *= 2.0;
            }
            while c * f * f > 2.0 * r {
                f *= 0.5;
            }
            if f != 1.0 {
                changed = true;
                d[i] *= f;
                for k in 0..N {
                    b[(k, i)] *= f;
                    b[(i, k)] /= f;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (b, d)
}

/// `exp(a)` for a square matrix. The argument is balanced by an exact
/// diagonal similarity first, which keeps the number of squarings small for
/// Jacobians mixing very different state units.
pub fn expm<const N: usize>(a: &SMatrix<f64, N, N>) -> Result<SMatrix<f64, N, N>, NavError> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(NavError::NonFinite { what: "matrix exponential argument" });
    }
    let (b, d) = balance(a);
    let mut e = expm_balanced(&b);
    for i in 0..N {
        for j in 0..N {
            e[(i, j)] *= d[i] / d[j];
        }
    }
    Ok(e)
}

fn expm_balanced<const N: usize>(a: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = norm1(a);
    let squarings = if norm > SCALED_NORM { (norm / SCALED_NORM).log2().ceil() as i32 } else { 0 };
    let scaled = a * (0.5f64).powi(squarings);

    let mut result = SMatrix::<f64, N, N>::identity();
    let mut term = SMatrix::<f64, N, N>::identity();
    for k in 1..=MAX_TERMS {
        term = term * scaled / k as f64;
        result += term;
        if norm1(&term) <= f64::EPSILON * norm1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

/// State transition matrix `exp(J dt)` of the linearized dynamics.
pub fn state_transition_matrix(j: &Matrix8, dt: f64) -> Result<Matrix8, NavError> {
    if !dt.is_finite() {
        return Err(NavError::NonFinite { what: "time step" });
    }
    expm(&(j * dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix2;

    #[test]
    fn zero_is_identity() {
        assert_eq!(state_transition_matrix(&Matrix8::zeros(), 3.0).unwrap(), Matrix8::identity());
    }

    #[test]
    fn diagonal() {
        let d = [0.1, -0.5, 2.0, 0.0, -3.0, 1e-6, 0.7, -0.01];
        let j = Matrix8::from_diagonal(&d.into());
        let phi = state_transition_matrix(&j, 1.5).unwrap();
        for i in 0..8 {
            assert_relative_eq!(phi[(i, i)], (d[i] * 1.5).exp(), max_relative = 1e-14);
        }
        assert_eq!(phi[(0, 1)], 0.0);
    }

    #[test]
    fn nilpotent_block() {
        let mut j = Matrix8::zeros();
        j[(2, 3)] = 1.0;
        let phi = state_transition_matrix(&j, 2.0).unwrap();
        let mut expected = Matrix8::identity();
        expected[(2, 3)] = 2.0;
        assert_relative_eq!(phi, expected, epsilon = 1e-15);
        let small = expm(&Matrix2::new(0.0, 2.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(small, Matrix2::new(1.0, 2.0, 0.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn rotation_generator() {
        let theta = 7.3;
        let e = expm(&Matrix2::new(0.0, -theta, theta, 0.0)).unwrap();
        assert_relative_eq!(e, Matrix2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos()), epsilon = 1e-13);
    }

    #[test]
    fn rejects_non_finite() {
        let mut j = Matrix8::zeros();
        j[(1, 1)] = f64::NAN;
        assert!(state_transition_matrix(&j, 1.0).is_err());
    }
}
