//! Pivoted dense LU with a one-norm condition estimate.

use super::{ensure_finite, ensure_square, one_norm, DMat, DVec};
use crate::error::{Error, Result};

/// Condition numbers beyond this are treated as numerically singular.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Solve `A x = b` for a square, numerically nonsingular `A`.
///
/// The solve refuses inputs whose estimated one-norm condition number
/// exceeds [`CONDITION_LIMIT`], carrying the estimate in the error.
pub fn solve(a: &DMat, b: &DVec) -> Result<DVec> {
    let n = ensure_square(a)?;
    ensure_finite(a, "solve matrix")?;
    if b.len() != n {
        return Err(Error::invalid(format!(
            "right-hand side length {} does not match system size {}",
            b.len(),
            n
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "solve right-hand side".into(),
        });
    }
    let lu = LuFactors::new(a)?;
    let cond = one_norm(a) * lu.inverse_one_norm_estimate();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            cond,
            limit: CONDITION_LIMIT,
        });
    }
    Ok(lu.solve_vec(b))
}

/// Packed LU factors with partial pivoting: `P A = L U` with unit lower
/// triangle stored below the diagonal.
pub(crate) struct LuFactors {
    lu: DMat,
    piv: Vec<usize>,
}

impl LuFactors {
    pub(crate) fn new(a: &DMat) -> Result<Self> {
        let n = a.nrows();
        let mut lu = a.clone();
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in (k + 1)..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if p != k {
                lu.swap_rows(p, k);
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                return Err(Error::SingularSystem { step: k });
            }
            for i in (k + 1)..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                for j in (k + 1)..n {
                    let upd = m * lu[(k, j)];
                    lu[(i, j)] -= upd;
                }
            }
        }
        Ok(LuFactors { lu, piv })
    }

    pub(crate) fn solve_vec(&self, b: &DVec) -> DVec {
        let n = self.lu.nrows();
        let mut x = b.clone();
        // Rows were swapped wholesale during factorization, so all
        // permutations apply before the triangular solves.
        for k in 0..n {
            if self.piv[k] != k {
                x.swap_rows(self.piv[k], k);
            }
        }
        for k in 0..n {
            let xk = x[k];
            for i in (k + 1)..n {
                x[i] -= self.lu[(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in (k + 1)..n {
                s -= self.lu[(k, j)] * x[j];
            }
            x[k] = s / self.lu[(k, k)];
        }
        x
    }

    /// Solve with a matrix right-hand side, column by column.
    pub(crate) fn solve_mat(&self, b: &DMat) -> DMat {
        let mut out = DMat::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let col = DVec::from_column_slice(b.column(j).as_slice());
            out.set_column(j, &self.solve_vec(&col));
        }
        out
    }

    /// Solve `A^T x = b` with the same factorization:
    /// `A^T = U^T L^T P`, so forward-substitute with `U^T`, back-substitute
    /// with `L^T`, and undo the permutation.
    pub(crate) fn solve_transpose_vec(&self, b: &DVec) -> DVec {
        let n = self.lu.nrows();
        let mut x = b.clone();
        for k in 0..n {
            let mut s = x[k];
            for i in 0..k {
                s -= self.lu[(i, k)] * x[i];
            }
            x[k] = s / self.lu[(k, k)];
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for i in (k + 1)..n {
                s -= self.lu[(i, k)] * x[i];
            }
            x[k] = s;
        }
        for k in (0..n).rev() {
            if self.piv[k] != k {
                x.swap_rows(self.piv[k], k);
            }
        }
        x
    }

    /// Hager's estimator for `||A^{-1}||_1` using a handful of solves.
    pub(crate) fn inverse_one_norm_estimate(&self) -> f64 {
        let n = self.lu.nrows();
        let mut x = DVec::from_element(n, 1.0 / n as f64);
        let mut best = 0.0_f64;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            let y1: f64 = y.iter().map(|v| v.abs()).sum();
            best = best.max(y1);
            let xi = DVec::from_fn(n, |i, _| if y[i] >= 0.0 { 1.0 } else { -1.0 });
            let z = self.solve_transpose_vec(&xi);
            let (mut j_best, mut z_best) = (0usize, 0.0f64);
            for (j, zj) in z.iter().enumerate() {
                if zj.abs() > z_best {
                    z_best = zj.abs();
                    j_best = j;
                }
            }
            if z_best <= z.dot(&x) {
                break;
            }
            x = DVec::zeros(n);
            x[j_best] = 1.0;
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_solve_returns_rhs() {
        let a = DMat::identity(4, 4);
        let b = dvector![1.0, -2.0, 3.5, 0.0];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let a = dmatrix![2.0, 0.0; 0.0, 4.0];
        let x = solve(&a, &dvector![2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hand_inverted_two_by_two() {
        // [[1, 1/2], [1/2, 1/3]] has determinant 1/12 and inverse
        // 12 * [[1/3, -1/2], [-1/2, 1]], so the first column is (4, -6).
        let a = dmatrix![1.0, 0.5; 0.5, 1.0 / 3.0];
        let x = solve(&a, &dvector![1.0, 0.0]).unwrap();
        assert!((x[0] - 4.0).abs() < 1e-12);
        assert!((x[1] + 6.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = dmatrix![1.0, 2.0; 2.0, 4.0];
        match solve(&a, &dvector![1.0, 1.0]) {
            Err(Error::SingularSystem { .. }) | Err(Error::IllConditioned { .. }) => {}
            other => panic!("expected failure on singular system, got {other:?}"),
        }
    }

    #[test]
    fn near_singular_matrix_reports_condition() {
        let eps = 1e-16;
        let a = dmatrix![1.0, 1.0; 1.0, 1.0 + eps];
        match solve(&a, &dvector![1.0, 1.0]) {
            Err(Error::IllConditioned { cond, .. }) => assert!(cond > 1e14),
            Err(Error::SingularSystem { .. }) => {}
            other => panic!("expected conditioning failure, got {other:?}"),
        }
    }

    #[test]
    fn random_residuals_are_backward_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..=40);
            let a = DMat::from_fn(n, n, |i, j| {
                rng.gen_range(-1.0..1.0) + if i == j { 4.0 } else { 0.0 }
            });
            let b = DVec::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let x = solve(&a, &b).unwrap();
            let r = &a * &x - &b;
            let bound = 1e-10 * (one_norm(&a) * x.norm() + b.norm());
            assert!(r.norm() <= bound, "residual {} above {}", r.norm(), bound);
        }
    }

    #[test]
    fn transpose_solve_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 15;
        let a = DMat::from_fn(n, n, |i, j| {
            rng.gen_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 }
        });
        let b = DVec::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let lu = LuFactors::new(&a).unwrap();
        let x = lu.solve_transpose_vec(&b);
        let r = a.transpose() * &x - &b;
        assert!(r.norm() < 1e-10 * (1.0 + x.norm()));
    }
}
