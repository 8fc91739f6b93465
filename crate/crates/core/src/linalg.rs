//! Small dense helpers shared by the filters.

use crate::error::NavError;
use crate::state::{Matrix8, STATE_DIM};
#[allow(unused_imports)]
use num_traits::Float;

/// In-place lower Cholesky factorization of a column-major `n x n` symmetric
/// matrix. On success the lower triangle holds `L` and the strict upper
/// triangle is zeroed. On failure returns the zero-based index of the first
/// leading minor that is not positive.
pub fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut d = a[j + j * n];
        for k in 0..j {
            let l = a[j + k * n];
            d -= l * l;
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(j);
        }
        let djj = d.sqrt();
        a[j + j * n] = djj;
        for i in (j + 1)..n {
            let mut s = a[i + j * n];
            for k in 0..j {
                s -= a[i + k * n] * a[j + k * n];
            }
            a[i + j * n] = s / djj;
        }
        for i in 0..j {
            a[i + j * n] = 0.0;
        }
    }
    Ok(())
}

/// Lower Cholesky factor of an 8x8 covariance.
pub fn cholesky8(p: &Matrix8) -> Result<Matrix8, NavError> {
    let mut l = *p;
    cholesky_in_place(l.as_mut_slice(), STATE_DIM).map_err(|minor| NavError::NotPositiveDefinite { minor })?;
    Ok(l)
}

/// `(P + P^T) / 2`.
pub fn symmetrize(p: &Matrix8) -> Matrix8 {
    (p + p.transpose()) * 0.5
}

/// Maximum absolute asymmetry relative to the largest entry.
pub fn relative_asymmetry(p: &Matrix8) -> f64 {
    let scale = p.amax();
    if scale == 0.0 {
        return 0.0;
    }
    (p - p.transpose()).amax() / scale
}
