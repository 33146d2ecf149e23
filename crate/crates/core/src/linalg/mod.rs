//! Dense real linear algebra substrate.
//!
//! Everything downstream works with `f64` dense matrices at desk scale
//! (n up to a few thousand). The substrate provides a symmetric
//! eigendecomposition with an explicit accuracy contract, the matrix
//! exponential, the spectral norm, and pivoted linear solves with a
//! condition estimate.

mod expm;
mod solve;
mod sym_eig;

pub use expm::expm;
pub use solve::solve;
pub use sym_eig::{
    sym_eig, sym_tridiag_eigenvalues, tridiag_eigenvector, tridiagonal_parts, EigenDecomposition,
};

pub(crate) use solve::LuFactors;

/// Dense dynamically-sized real matrix.
pub type DMat = nalgebra::DMatrix<f64>;
/// Dense dynamically-sized real column vector.
pub type DVec = nalgebra::DVector<f64>;

use crate::error::{Error, Result};

/// Largest absolute entry. Zero for an empty matrix.
pub fn max_abs(m: &DMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()))
}

/// Maximum absolute row sum (the operator infinity-norm).
pub fn inf_norm(m: &DMat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        let mut s = 0.0;
        for j in 0..m.ncols() {
            s += m[(i, j)].abs();
        }
        worst = worst.max(s);
    }
    worst
}

/// Maximum absolute column sum (the operator 1-norm).
pub fn one_norm(m: &DMat) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.ncols() {
        let mut s = 0.0;
        for i in 0..m.nrows() {
            s += m[(i, j)].abs();
        }
        worst = worst.max(s);
    }
    worst
}

/// Largest absolute difference between `m` and its transpose.
pub fn asymmetry(m: &DMat) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn ensure_square(m: &DMat) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_finite(m: &DMat, context: &str) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    context: format!("{context} at entry ({i}, {j})"),
                });
            }
        }
    }
    Ok(())
}

/// Eigenvalues of the symmetric part of `a`, ascending. No asymmetry check
/// is performed; the input is symmetrized entrywise first.
pub fn sym_eigenvalues(a: &DMat) -> Vec<f64> {
    sym_eig::sym_eigenvalues_unchecked(a)
}

/// Largest singular value, computed as the square root of the largest
/// eigenvalue of the Gram matrix on the smaller side. The squaring is
/// harmless for the top singular value (relative accuracy is far better
/// than the 1e-8 contract); small singular values are not reported here.
pub fn spectral_norm(a: &DMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    // Work on A/scale to keep the Gram matrix away from overflow.
    let b = a / scale;
    let gram = if a.nrows() >= a.ncols() {
        b.transpose() * &b
    } else {
        &b * b.transpose()
    };
    let evals = sym_eig::sym_eigenvalues_unchecked(&gram);
    let top = evals.last().copied().unwrap_or(0.0).max(0.0);
    scale * top.sqrt()
}
