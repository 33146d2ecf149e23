//! Matrix exponential.
//!
//! Symmetric matrices are exponentiated through their eigendecomposition,
//! which keeps long-time tails `exp(-delta t)` accurate down to underflow.
//! General matrices use diagonal Padé approximants with scaling and
//! squaring, choosing the order from the scaled one-norm.

use super::sym_eig::{sym_eig, SYM_EIG_ASYMMETRY_TOL};
use super::{asymmetry, ensure_finite, ensure_square, max_abs, one_norm, DMat, LuFactors};
use crate::error::{Error, Result};

// One-norm thresholds under which the [m/m] diagonal Padé approximant of
// exp reaches unit-roundoff backward error.
#[allow(clippy::excessive_precision)]
mod theta {
    pub const THETA_3: f64 = 1.495585217958292e-2;
    pub const THETA_5: f64 = 2.539398330063230e-1;
    pub const THETA_7: f64 = 9.504178996162932e-1;
    pub const THETA_9: f64 = 2.097847961257068e0;
    pub const THETA_13: f64 = 5.371920351148152e0;
}
use theta::{THETA_13, THETA_3, THETA_5, THETA_7, THETA_9};

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Compute `exp(t A)`.
///
/// `t` must be nonnegative: the semigroups modelled here live on t >= 0 and
/// a negative time is a caller bug. `expm(A, 0)` is the identity exactly.
pub fn expm(a: &DMat, t: f64) -> Result<DMat> {
    let n = ensure_square(a)?;
    ensure_finite(a, "expm input")?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    if t == 0.0 {
        return Ok(DMat::identity(n, n));
    }
    let scale = max_abs(a);
    if scale == 0.0 {
        return Ok(DMat::identity(n, n));
    }
    if asymmetry(a) <= SYM_EIG_ASYMMETRY_TOL * scale {
        let eig = sym_eig(a)?;
        Ok(eig.apply_spectral(|lambda| (t * lambda).exp()))
    } else {
        expm_pade(&(a * t))
    }
}

/// Scaling-and-squaring Padé evaluation of `exp(M)` for a general matrix.
fn expm_pade(m: &DMat) -> Result<DMat> {
    let n = m.nrows();
    let norm = one_norm(m);

    if norm <= THETA_9 {
        let (order, coeffs): (usize, &[f64]) = if norm <= THETA_3 {
            (3, &PADE_3)
        } else if norm <= THETA_5 {
            (5, &PADE_5)
        } else if norm <= THETA_7 {
            (7, &PADE_7)
        } else {
            (9, &PADE_9)
        };
        return pade_low_order(m, order, coeffs);
    }

    let squarings = ((norm / THETA_13).log2().ceil() as i32).max(0);
    let scaled = m / 2f64.powi(squarings);
    let mut result = pade_13(&scaled)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    let _ = n;
    Ok(result)
}

/// Orders 3/5/7/9: U = A * sum b_{2k+1} A^{2k}, V = sum b_{2k} A^{2k},
/// then solve (V - U) X = V + U.
fn pade_low_order(a: &DMat, order: usize, b: &[f64]) -> Result<DMat> {
    let n = a.nrows();
    let mut powers: Vec<DMat> = vec![DMat::identity(n, n)];
    let a2 = a * a;
    for _ in 0..(order - 1) / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u_sum = DMat::zeros(n, n);
    let mut v = DMat::zeros(n, n);
    for (k, pow) in powers.iter().enumerate() {
        u_sum += pow * b[2 * k + 1];
        v += pow * b[2 * k];
    }
    let u = a * u_sum;
    solve_pade_system(&u, &v)
}

fn pade_13(a: &DMat) -> Result<DMat> {
    let n = a.nrows();
    let b = &PADE_13;
    let id = DMat::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u_poly = &a6 * &inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = a * u_poly;

    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * &inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];

    solve_pade_system(&u, &v)
}

fn solve_pade_system(u: &DMat, v: &DMat) -> Result<DMat> {
    let denom = v - u;
    let numer = v + u;
    let lu = LuFactors::new(&denom).map_err(|_| Error::EigenFailure {
        detail: "Pade denominator is singular".into(),
    })?;
    Ok(lu.solve_mat(&numer))
}
