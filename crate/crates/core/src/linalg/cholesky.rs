use super::matrix::{DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Relative tolerance on `|H(i,j) - H(j,i)|` before a matrix is refused as
/// non-symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// A pivot is degenerate when it does not exceed `PIVOT_EPSILON * trace / t`.
pub const PIVOT_EPSILON: f64 = 1e-12;

/// Solves `H u = f` for symmetric positive-definite `H` by Cholesky
/// factorization.
///
/// `H` is symmetrized as `(H + Hᵀ)/2` first, so accumulation-order asymmetry
/// in the caller does not matter. A non-positive (or vanishing) pivot means the
/// columns generating `H` are linearly dependent and is reported as
/// [`Error::DegenerateAtomSet`].
pub fn solve_spd(h: &DenseMatrix, f: &DenseVector) -> Result<DenseVector> {
    let t = h.rows();
    if h.cols() != t {
        return Err(Error::shape("solve_spd", h.shape(), (f.len(), 1)));
    }
    if f.len() != t {
        return Err(Error::shape("solve_spd", h.shape(), (f.len(), 1)));
    }

    let scale = h.max_abs();
    let mut asymmetry = 0.0_f64;
    for i in 0..t {
        for j in 0..i {
            asymmetry = asymmetry.max((h.get(i, j) - h.get(j, i)).abs());
        }
    }
    let tolerance = SYMMETRY_TOLERANCE * scale;
    if asymmetry > tolerance {
        return Err(Error::NotSymmetric {
            asymmetry,
            tolerance,
        });
    }

    let trace: f64 = (0..t).map(|i| h.get(i, i)).sum();
    let threshold = PIVOT_EPSILON * trace / t as f64;

    // Lower-triangular factor, row-major, built from the symmetrized matrix.
    let mut l = vec![0.0; t * t];
    for j in 0..t {
        let mut d = h.get(j, j);
        for k in 0..j {
            d -= l[j * t + k] * l[j * t + k];
        }
        if d.is_nan() || threshold.is_nan() || threshold <= 0.0 || d <= threshold {
            return Err(Error::DegenerateAtomSet {
                row: j + 1,
                pivot: d,
                threshold,
            });
        }
        let ljj = d.sqrt();
        l[j * t + j] = ljj;
        for i in j + 1..t {
            let mut s = 0.5 * (h.get(i, j) + h.get(j, i));
            for k in 0..j {
                s -= l[i * t + k] * l[j * t + k];
            }
            l[i * t + j] = s / ljj;
        }
    }

    // L z = f
    let mut u = f.as_slice().to_vec();
    for i in 0..t {
        let mut s = u[i];
        for k in 0..i {
            s -= l[i * t + k] * u[k];
        }
        u[i] = s / l[i * t + i];
    }
    // Lᵀ u = z
    for i in (0..t).rev() {
        let mut s = u[i];
        for k in i + 1..t {
            s -= l[k * t + i] * u[k];
        }
        u[i] = s / l[i * t + i];
    }
    Ok(u.into())
}

/// Multiply-adds spent by [`solve_spd`] on a `t × t` system: the factorization
/// plus the two triangular solves.
pub fn solve_spd_flops(t: usize) -> u64 {
    let t = t as u64;
    // sum_j (j + (t-1-j)(j+1)) for the factor, t(t-1) for the two solves.
    let factor: u64 = (0..t).map(|j| j + (t - 1 - j) * (j + 1)).sum();
    factor + t * t.saturating_sub(1)
}
