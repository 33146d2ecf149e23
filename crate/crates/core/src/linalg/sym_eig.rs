//! Symmetric eigendecomposition.
//!
//! Dense matrices go through Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration, accumulating the orthogonal
//! transformation (the classic Handbook/EISPACK pair). Matrices that are
//! already tridiagonal can skip the reduction entirely through
//! [`sym_tridiag_eigenvalues`], which costs O(n^2) and makes n ~ 4000
//! second-order stencils cheap.

use super::{asymmetry, ensure_finite, ensure_square, max_abs, DMat, DVec};
use crate::error::{Error, Result};

/// Relative asymmetry admitted by [`sym_eig`].
pub const SYM_EIG_ASYMMETRY_TOL: f64 = 1e-12;

const MAX_QL_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
///
/// Contract for an input A with `||A||_2 = s`:
/// `||Q L Q^T - A||_2 <= 1e-10 * max(1, s)` and `||Q^T Q - I||_2 <= 1e-10`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending eigenvalues.
    pub eigenvalues: DVec,
    /// Orthonormal eigenvector columns, ordered like `eigenvalues`.
    pub eigenvectors: DMat,
}

impl EigenDecomposition {
    /// Reassemble `Q f(L) Q^T` for a scalar function of the eigenvalues.
    pub fn apply_spectral<F: Fn(f64) -> f64>(&self, f: F) -> DMat {
        let q = &self.eigenvectors;
        let scaled = DMat::from_fn(q.nrows(), q.ncols(), |i, j| {
            q[(i, j)] * f(self.eigenvalues[j])
        });
        scaled * q.transpose()
    }
}

/// Symmetric eigendecomposition of a dense matrix.
///
/// The input must be square and symmetric to within `1e-12` relative
/// asymmetry; anything worse is rejected with the measured asymmetry.
pub fn sym_eig(a: &DMat) -> Result<EigenDecomposition> {
    let n = ensure_square(a)?;
    ensure_finite(a, "sym_eig input")?;
    let scale = max_abs(a);
    if scale > 0.0 {
        let asym = asymmetry(a);
        if asym > SYM_EIG_ASYMMETRY_TOL * scale {
            return Err(Error::Asymmetric {
                max_asymmetry: asym,
                tol: SYM_EIG_ASYMMETRY_TOL * scale,
            });
        }
    }

    // Work on the symmetrized copy so roundoff-level asymmetry cannot leak
    // into the reduction.
    let mut work = DMat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let (mut d, mut e) = tridiagonalize(&mut work, true);
    ql_implicit(&mut d, &mut e, Some(&mut work))?;
    sort_ascending(&mut d, Some(&mut work));

    Ok(EigenDecomposition {
        eigenvalues: DVec::from_vec(d),
        eigenvectors: work,
    })
}

/// Eigenvalues of a symmetric matrix, ascending, without input validation.
/// The caller guarantees the matrix is (numerically) symmetric.
pub(crate) fn sym_eigenvalues_unchecked(a: &DMat) -> Vec<f64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut work = DMat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let (mut d, mut e) = tridiagonalize(&mut work, false);
    ql_implicit(&mut d, &mut e, None).expect("QL iteration did not converge on a symmetric matrix");
    sort_ascending(&mut d, None);
    d
}

/// Ascending eigenvalues of the symmetric tridiagonal matrix with the given
/// diagonal and first off-diagonal (`offdiag.len() == diag.len() - 1`).
pub fn sym_tridiag_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(Error::invalid(format!(
            "tridiagonal data sizes mismatch: {} diagonal vs {} off-diagonal entries",
            n,
            offdiag.len()
        )));
    }
    if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "tridiagonal eigenvalue input".into(),
        });
    }
    let mut d = diag.to_vec();
    // Internal convention: e[i] couples rows i-1 and i, e[0] unused.
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(offdiag);
    ql_implicit(&mut d, &mut e, None)?;
    sort_ascending(&mut d, None);
    Ok(d)
}

/// Extract `(diag, offdiag)` when the matrix is exactly tridiagonal
/// (all entries beyond the first off-diagonal are identically zero).
/// The band is symmetrized entrywise.
pub fn tridiagonal_parts(m: &DMat) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = m.nrows();
    if n != m.ncols() || n == 0 {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            if (j > i + 1 || i > j + 1) && m[(i, j)] != 0.0 {
                return None;
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let off: Vec<f64> = (0..n - 1)
        .map(|i| 0.5 * (m[(i, i + 1)] + m[(i + 1, i)]))
        .collect();
    Some((diag, off))
}

/// Eigenvector of a symmetric tridiagonal matrix for an isolated eigenvalue,
/// by inverse iteration with a pivoted tridiagonal factorization.
/// Returns the unit-norm vector.
pub fn tridiag_eigenvector(diag: &[f64], offdiag: &[f64], lambda: f64) -> Result<DVec> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(Error::invalid(
            "tridiagonal data sizes mismatch in eigenvector computation".to_string(),
        ));
    }
    if n == 1 {
        return Ok(DVec::from_element(1, 1.0));
    }
    let scale = diag
        .iter()
        .chain(offdiag.iter())
        .fold(lambda.abs(), |acc, v| acc.max(v.abs()))
        .max(1.0);
    let factors = TridiagLu::factor(diag, offdiag, lambda, scale);

    // Deterministic pseudo-random start; generic overlap with the target.
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut v = DVec::from_fn(n, |_, _| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
    });
    v /= v.norm();

    let mut best = v.clone();
    let mut best_res = f64::INFINITY;
    for _ in 0..6 {
        let mut w = factors.solve(&v);
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        w /= norm;
        let res = tridiag_residual(diag, offdiag, lambda, &w);
        if res < best_res {
            best_res = res;
            best = w.clone();
        }
        if res <= 1e-13 * scale {
            break;
        }
        v = w;
    }
    if best_res > 1e-6 * scale {
        return Err(Error::EigenFailure {
            detail: format!(
                "inverse iteration stalled at residual {best_res:.3e} for eigenvalue {lambda:.6e}"
            ),
        });
    }
    Ok(best)
}

fn tridiag_residual(diag: &[f64], off: &[f64], lambda: f64, v: &DVec) -> f64 {
    let n = diag.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut r = (diag[i] - lambda) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        worst = worst.max(r.abs());
    }
    worst
}

/// Pivoted LU of `T - lambda I` for a symmetric tridiagonal `T`.
/// Zero pivots are replaced by a tiny multiple of the scale, which is the
/// standard inverse-iteration safeguard.
struct TridiagLu {
    dd: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], lambda: f64, scale: f64) -> Self {
        let n = diag.len();
        let tiny = f64::EPSILON * scale * 1e-2;
        let mut dd: Vec<f64> = diag.iter().map(|&x| x - lambda).collect();
        let mut du = off.to_vec();
        let mut dl = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for k in 0..n - 1 {
            if dd[k].abs() >= dl[k].abs() {
                if dd[k] == 0.0 {
                    dd[k] = tiny;
                }
                let m = dl[k] / dd[k];
                dl[k] = m;
                dd[k + 1] -= m * du[k];
            } else {
                swapped[k] = true;
                let m = dd[k] / dl[k];
                dd[k] = dl[k];
                dl[k] = m;
                let old_upper = du[k];
                du[k] = dd[k + 1];
                dd[k + 1] = old_upper - m * dd[k + 1];
                if k + 2 < n {
                    du2[k] = du[k + 1];
                    du[k + 1] *= -m;
                }
            }
        }
        if dd[n - 1] == 0.0 {
            dd[n - 1] = tiny;
        }
        TridiagLu {
            dd,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, b: &DVec) -> DVec {
        let n = self.dd.len();
        let mut x = b.clone();
        for k in 0..n - 1 {
            if self.swapped[k] {
                x.swap_rows(k, k + 1);
            }
            let upd = self.dl[k] * x[k];
            x[k + 1] -= upd;
        }
        x[n - 1] /= self.dd[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.dd[n - 2];
        }
        for k in (0..n.saturating_sub(2)).rev() {
            let mut v = x[k] - self.du[k] * x[k + 1];
            if k + 2 < n {
                v -= self.du2[k] * x[k + 2];
            }
            x[k] = v / self.dd[k];
        }
        x
    }
}

/// Householder reduction to tridiagonal form. On return `d` holds the
/// tridiagonal diagonal and `e[i]` the coupling between rows `i-1` and `i`
/// (`e[0]` is zero). With `accumulate`, `work` is overwritten with the
/// orthogonal matrix effecting the reduction; otherwise its content is
/// unspecified afterwards.
fn tridiagonalize(work: &mut DMat, accumulate: bool) -> (Vec<f64>, Vec<f64>) {
    let n = work.nrows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut s = 0.0;
            for k in 0..=l {
                s += work[(i, k)].abs();
            }
            if s == 0.0 {
                e[i] = work[(i, l)];
            } else {
                for k in 0..=l {
                    work[(i, k)] /= s;
                    h += work[(i, k)] * work[(i, k)];
                }
                let f = work[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = s * g;
                h -= f * g;
                work[(i, l)] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    if accumulate {
                        work[(j, i)] = work[(i, j)] / h;
                    }
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += work[(j, k)] * work[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g_acc += work[(k, j)] * work[(i, k)];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * work[(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = work[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let upd = f * e[k] + g * work[(i, k)];
                        work[(j, k)] -= upd;
                    }
                }
            }
        } else {
            e[i] = work[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;

    if accumulate {
        for i in 0..n {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += work[(i, k)] * work[(k, j)];
                    }
                    for k in 0..i {
                        let upd = g * work[(k, i)];
                        work[(k, j)] -= upd;
                    }
                }
            }
            d[i] = work[(i, i)];
            work[(i, i)] = 1.0;
            for j in 0..i {
                work[(j, i)] = 0.0;
                work[(i, j)] = 0.0;
            }
        }
    } else {
        for i in 0..n {
            d[i] = work[(i, i)];
        }
    }
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// `e[i]` couples rows `i-1` and `i` at entry. Eigenvalues land in `d`
/// (unsorted); rotations are accumulated into `q` when given.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut q: Option<&mut DMat>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::EigenFailure {
                    detail: format!("QL iteration exceeded {MAX_QL_SWEEPS} sweeps at index {l}"),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;

            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = q.as_deref_mut() {
                    for k in 0..n {
                        f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sort_ascending(d: &mut [f64], q: Option<&mut DMat>) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    d.copy_from_slice(&sorted);
    if let Some(z) = q {
        let old = z.clone();
        for (new_col, &src) in order.iter().enumerate() {
            z.set_column(new_col, &old.column(src));
        }
    }
}
