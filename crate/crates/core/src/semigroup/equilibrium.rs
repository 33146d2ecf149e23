//! Spectral bound, equilibrium projections, convergence profiles, rate
//! fitting and the four-way asymptotic classification.

use nalgebra::Complex;

use super::{is_irreducible, is_metzler, Generator, METZLER_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    expm, max_abs, sym_eig, sym_tridiag_eigenvalues, tridiag_eigenvector, tridiagonal_parts, DMat,
    DVec, LuFactors,
};

/// The dominant eigenvalue counts as simple when its distance to the next
/// real part is at least this factor times `max(1, |lambda0|)`.
pub const SIMPLICITY_REL_GAP: f64 = 1e-8;

/// Eigenvalues within this distance of the spectral bound count towards the
/// kernel dimension of the shifted generator. Discretization error dominates
/// well before this threshold.
const KERNEL_CLUSTER_TOL: f64 = 1e-7;

/// Spectral bounds below this are treated as strict decay.
const DECAY_TOL: f64 = 1e-8;

pub(crate) enum EigKind {
    Real(Vec<f64>),
    Complex(Vec<Complex<f64>>),
}

pub(crate) struct SpectralOverview {
    pub lambda0: f64,
    /// Largest real part among the remaining eigenvalues, `None` for n = 1.
    pub next_re: Option<f64>,
    pub kind: EigKind,
}

impl SpectralOverview {
    pub fn gap(&self) -> Option<f64> {
        self.next_re.map(|next| self.lambda0 - next)
    }

    pub fn simple(&self) -> bool {
        match self.next_re {
            None => true,
            Some(next) => self.lambda0 - next >= SIMPLICITY_REL_GAP * self.lambda0.abs().max(1.0),
        }
    }

    fn require_simple(&self) -> Result<()> {
        if self.simple() {
            return Ok(());
        }
        let next = self
            .next_re
            .expect("non-simple requires a second eigenvalue");
        Err(Error::DominantNotSimple {
            lambda0: self.lambda0,
            nearest: next,
            gap: self.lambda0 - next,
            required: SIMPLICITY_REL_GAP * self.lambda0.abs().max(1.0),
        })
    }
}

pub(crate) fn spectral_overview(g: &Generator) -> Result<SpectralOverview> {
    let kind = if g.is_self_adjoint() {
        let b = g.symmetrized();
        let evals = match tridiagonal_parts(&b) {
            Some((d, e)) => sym_tridiag_eigenvalues(&d, &e)?,
            None => sym_eig(&b)?.eigenvalues.iter().copied().collect(),
        };
        EigKind::Real(evals)
    } else {
        let schur = nalgebra::linalg::Schur::try_new(g.matrix().clone(), f64::EPSILON, 100_000)
            .ok_or_else(|| Error::EigenFailure {
                detail: "Schur iteration did not converge".into(),
            })?;
        EigKind::Complex(schur.complex_eigenvalues().iter().copied().collect())
    };
    let mut re_parts: Vec<f64> = match &kind {
        EigKind::Real(v) => v.clone(),
        EigKind::Complex(v) => v.iter().map(|z| z.re).collect(),
    };
    re_parts.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(SpectralOverview {
        lambda0: re_parts[0],
        next_re: re_parts.get(1).copied(),
        kind,
    })
}

/// `spb(A)`: the largest real part of the spectrum of the generator.
pub fn spectral_bound(g: &Generator) -> Result<f64> {
    Ok(spectral_overview(g)?.lambda0)
}

/// Spectral gap `spb(A) - max{Re l : l != spb}`; `None` for a 1x1 generator.
pub fn spectral_gap(g: &Generator) -> Result<Option<f64>> {
    Ok(spectral_overview(g)?.gap())
}

/// The rank-one limit data `(lambda0, u, phi)` with `P = phi (x) u` in the
/// mass-weighted pairing.
///
/// `u` is the right eigenvector at the spectral bound, sign-normalized
/// (largest-magnitude entry positive) and of unit Euclidean norm. `phi` is
/// the left eigenvector with respect to the weighted pairing, scaled so that
/// `sum_i w_i phi_i u_i = 1`, which makes `rank1` a projection.
#[derive(Debug, Clone)]
pub struct EquilibriumProjection {
    pub lambda0: f64,
    pub u: DVec,
    pub phi: DVec,
    /// The projection matrix `u (w . phi)^T`.
    pub rank1: DMat,
    /// `lambda0` minus the next-largest real part; `None` for n = 1.
    pub gap: Option<f64>,
}

pub fn equilibrium_projection(g: &Generator) -> Result<EquilibriumProjection> {
    let n = g.dim();
    let ov = spectral_overview(g)?;
    ov.require_simple()?;
    let lambda0 = ov.lambda0;
    let w = g.mass_weights();

    let (mut u, mut phi) = if g.is_self_adjoint() {
        let b = g.symmetrized();
        let y = match tridiagonal_parts(&b) {
            Some((d, e)) => tridiag_eigenvector(&d, &e, lambda0)?,
            None => {
                let eig = sym_eig(&b)?;
                DVec::from_column_slice(eig.eigenvectors.column(n - 1).as_slice())
            }
        };
        let dsq = g.sqrt_weights();
        let u = DVec::from_fn(n, |i, _| y[i] / dsq[i]);
        (u.clone(), u)
    } else {
        let shifted = g.matrix() - DMat::identity(n, n) * lambda0;
        let scale = max_abs(g.matrix()).max(lambda0.abs()).max(1.0);
        let u = dense_inverse_iteration(&shifted, false, scale)?;
        let psi = dense_inverse_iteration(&shifted, true, scale)?;
        let phi = DVec::from_fn(n, |i, _| psi[i] / w[i]);
        (u, phi)
    };

    sign_normalize(&mut u);
    sign_normalize(&mut phi);
    u /= u.norm();

    let pairing: f64 = (0..n).map(|i| w[i] * phi[i] * u[i]).sum();
    if pairing.abs() <= 1e-12 * phi.norm() {
        return Err(Error::EigenFailure {
            detail: format!(
                "left and right dominant eigenvectors are numerically orthogonal \
                 (pairing {pairing:.3e}); the projection is not defined"
            ),
        });
    }
    phi /= pairing;

    // Residual contracts for both eigenvectors.
    let ru = (g.matrix() * &u - &u * lambda0).norm();
    if ru > 1e-8 {
        return Err(Error::EigenFailure {
            detail: format!("right eigenvector residual {ru:.3e} exceeds 1e-8"),
        });
    }
    let weighted_phi = DVec::from_fn(n, |i, _| w[i] * phi[i]);
    let lhs = g.matrix().transpose() * &weighted_phi;
    let rphi = DVec::from_fn(n, |i, _| lhs[i] / w[i] - lambda0 * phi[i]).norm();
    if rphi > 1e-8 * phi.norm() {
        return Err(Error::EigenFailure {
            detail: format!("left eigenvector residual {rphi:.3e} exceeds contract"),
        });
    }

    // Perron structure: positive irreducible generators must produce
    // strictly positive eigenvector pairs after sign normalization.
    if is_metzler(g, METZLER_TOL).metzler && is_irreducible(g)? {
        let min_u = u.min();
        let min_phi = phi.min();
        if min_u <= 0.0 || min_phi <= 0.0 {
            return Err(Error::EigenFailure {
                detail: format!(
                    "Perron structure violated: min(u) = {min_u:.3e}, min(phi) = {min_phi:.3e}"
                ),
            });
        }
    }

    let rank1 = DMat::from_fn(n, n, |i, j| u[i] * w[j] * phi[j]);
    Ok(EquilibriumProjection {
        lambda0,
        u,
        phi,
        rank1,
        gap: ov.gap(),
    })
}

fn sign_normalize(v: &mut DVec) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        *v = -v.clone();
    }
}

fn dense_inverse_iteration(shifted: &DMat, transpose: bool, scale: f64) -> Result<DVec> {
    let n = shifted.nrows();
    let mut bump = 0.0_f64;
    let mut factors: Option<LuFactors> = None;
    for attempt in 0..4 {
        let candidate = if bump == 0.0 {
            shifted.clone()
        } else {
            shifted + DMat::identity(n, n) * bump
        };
        match LuFactors::new(&candidate) {
            Ok(f) => {
                factors = Some(f);
                break;
            }
            Err(_) => bump = scale * 1e-13 * 10f64.powi(attempt),
        }
    }
    let factors = factors.ok_or_else(|| Error::EigenFailure {
        detail: "inverse iteration could not factor the shifted matrix".into(),
    })?;

    let mut v = deterministic_unit_vector(n, if transpose { 2 } else { 1 });
    let mut best = v.clone();
    let mut best_res = f64::INFINITY;
    for _ in 0..8 {
        let mut next = if transpose {
            factors.solve_transpose_vec(&v)
        } else {
            factors.solve_vec(&v)
        };
        let norm = next.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        next /= norm;
        let res = if transpose {
            (shifted.transpose() * &next).norm()
        } else {
            (shifted * &next).norm()
        };
        if res < best_res {
            best_res = res;
            best = next.clone();
        }
        if res <= 1e-12 * scale {
            break;
        }
        v = next;
    }
    if best_res > 1e-8 {
        return Err(Error::EigenFailure {
            detail: format!("inverse iteration residual {best_res:.3e} exceeds 1e-8"),
        });
    }
    Ok(best)
}

fn deterministic_unit_vector(n: usize, seed: u64) -> DVec {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15 ^ seed.wrapping_mul(0xD134_2543_DE82_EF95);
    let mut v = DVec::from_fn(n, |_, _| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
    });
    v /= v.norm();
    v
}

/// Evaluates the rescaled semigroup `R(t) = exp(-lambda0 t) exp(t A)`.
///
/// Self-adjoint generators are evaluated through one eigendecomposition of
/// the weighted similarity, after which every time point costs one matrix
/// multiply. General generators exponentiate the shifted matrix
/// `A - lambda0 I` directly, which keeps entries of order one for all times.
pub struct SemigroupEvaluator {
    lambda0: f64,
    gap: Option<f64>,
    kind: EvalKind,
}

enum EvalKind {
    Spectral {
        q: DMat,
        qadj: DMat,
        shifted_evals: Vec<f64>,
    },
    Direct {
        shifted: DMat,
    },
}

impl SemigroupEvaluator {
    pub fn new(g: &Generator) -> Result<Self> {
        let n = g.dim();
        if g.is_self_adjoint() {
            let b = g.symmetrized();
            let eig = sym_eig(&b)?;
            let lambda0 = eig.eigenvalues[n - 1];
            let gap = if n > 1 {
                Some(lambda0 - eig.eigenvalues[n - 2])
            } else {
                None
            };
            let dsq = g.sqrt_weights();
            let q = DMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)] / dsq[i]);
            let qadj = DMat::from_fn(n, n, |i, j| eig.eigenvectors[(j, i)] * dsq[j]);
            let shifted_evals = eig.eigenvalues.iter().map(|l| l - lambda0).collect();
            Ok(SemigroupEvaluator {
                lambda0,
                gap,
                kind: EvalKind::Spectral {
                    q,
                    qadj,
                    shifted_evals,
                },
            })
        } else {
            let ov = spectral_overview(g)?;
            let shifted = g.matrix() - DMat::identity(n, n) * ov.lambda0;
            Ok(SemigroupEvaluator {
                lambda0: ov.lambda0,
                gap: ov.gap(),
                kind: EvalKind::Direct { shifted },
            })
        }
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    /// `exp(-lambda0 t) exp(t A)` at a single time.
    pub fn rescaled_at(&self, t: f64) -> Result<DMat> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeTime { t });
        }
        match &self.kind {
            EvalKind::Spectral {
                q,
                qadj,
                shifted_evals,
            } => {
                let n = q.nrows();
                let scaled = DMat::from_fn(n, n, |i, j| q[(i, j)] * (shifted_evals[j] * t).exp());
                Ok(scaled * qadj)
            }
            EvalKind::Direct { shifted } => expm(shifted, t),
        }
    }
}

/// Distance-to-equilibrium profile `d(t) = || exp(-lambda0 t) exp(t A) - P ||`
/// in the operator norm of the weighted space.
///
/// For self-adjoint generators the profile is evaluated through the spectral
/// decomposition, where it equals `exp(-(lambda0 - lambda1) t)` exactly and
/// is monotone decreasing.
pub fn convergence_profile(
    g: &Generator,
    proj: &EquilibriumProjection,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    validate_times(times)?;
    if g.is_self_adjoint() {
        let decay = proj.gap.map(|gap| -gap);
        Ok(times
            .iter()
            .map(|&t| match decay {
                None => (t, 0.0),
                Some(rate) => (t, (rate * t).exp()),
            })
            .collect())
    } else {
        let ev = SemigroupEvaluator::new(g)?;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let r = ev.rescaled_at(t)? - &proj.rank1;
            out.push((t, g.weighted_operator_norm(&r)));
        }
        Ok(out)
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("profile times must be nonempty".to_string()));
    }
    for (k, &t) in times.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::invalid(format!(
                "profile times must be positive and finite, got {t} at index {k}"
            )));
        }
        if k > 0 && t <= times[k - 1] {
            return Err(Error::invalid(
                "profile times must be strictly increasing".to_string(),
            ));
        }
    }
    Ok(())
}

/// Least-squares exponential fit of a distance profile,
/// `d(t) ~ prefactor * exp(-rate * t)`.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialFit {
    /// The multiplicative constant `M = exp(intercept)`.
    pub prefactor: f64,
    /// The decay rate `delta = -slope`.
    pub rate: f64,
}

/// Fit `log d(t)` against `t` over the points with `d > 1e-14`; points at
/// numerical zero are dropped. Requires at least 4 usable points.
pub fn fit_exponential_rate(profile: &[(f64, f64)]) -> Result<ExponentialFit> {
    let usable: Vec<(f64, f64)> = profile
        .iter()
        .copied()
        .filter(|&(t, d)| t.is_finite() && d.is_finite() && d > 1e-14)
        .collect();
    if usable.len() < 4 {
        return Err(Error::ProfileTooShort {
            usable: usable.len(),
            needed: 4,
        });
    }
    let n = usable.len() as f64;
    let (mut st, mut sl, mut stt, mut stl) = (0.0, 0.0, 0.0, 0.0);
    for &(t, d) in &usable {
        let l = d.ln();
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return Err(Error::invalid(
            "profile times are degenerate; cannot fit a rate".to_string(),
        ));
    }
    let slope = (n * stl - st * sl) / denom;
    let intercept = (sl - slope * st) / n;
    Ok(ExponentialFit {
        prefactor: intercept.exp(),
        rate: -slope,
    })
}

/// Long-time classes for a positive (Metzler) matrix semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticClass {
    /// Spectral bound strictly negative: the semigroup decays to zero.
    DecayToZero,
    /// Simple eigenvalue at the spectral bound: rank-one convergence of the
    /// rescaled semigroup.
    ConvergesRank1,
    /// A fixed dual functional without a fixed vector. Unreachable for real
    /// matrices (row rank equals column rank); kept for interface
    /// completeness.
    NotConvergentFixedFunctional,
    /// Kernel dimension at the spectral bound is two or more.
    NotConvergentMulti,
}

impl AsymptoticClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            AsymptoticClass::DecayToZero => "decay_to_zero",
            AsymptoticClass::ConvergesRank1 => "converges_rank1",
            AsymptoticClass::NotConvergentFixedFunctional => "not_convergent_fixed_functional",
            AsymptoticClass::NotConvergentMulti => "not_convergent_multi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub class: AsymptoticClass,
    pub spectral_bound: f64,
    /// Number of eigenvalues within `1e-7` of the spectral bound.
    pub kernel_dim: usize,
    /// Eigenvalues `(re, im)` whose real part sits at the spectral bound but
    /// with a nonzero imaginary part. Genuine Metzler generators cannot
    /// produce these; the warning flags near-threshold numerics.
    pub peripheral: Vec<(f64, f64)>,
}

/// Four-way classification of the long-time behaviour of a positive matrix
/// semigroup. Kernel dimensions are counted at the spectral bound, i.e. on
/// the shifted generator `A - spb(A) I`; a spectral bound below `-1e-8`
/// classifies as decay to zero without shifting.
///
/// Requires a Metzler generator; others are refused (the notion of a
/// positive semigroup does not apply — a rotation generator, for example,
/// is rejected here and belongs to the eventual-positivity analysis).
pub fn classify_asymptotics(g: &Generator) -> Result<ClassificationReport> {
    let report = is_metzler(g, METZLER_TOL);
    if !report.metzler {
        return Err(Error::NotMetzler {
            witness: report.min_off_diagonal,
        });
    }
    let ov = spectral_overview(g)?;
    let lambda0 = ov.lambda0;
    let eigenvalues: Vec<Complex<f64>> = match ov.kind {
        EigKind::Real(v) => v.into_iter().map(|r| Complex::new(r, 0.0)).collect(),
        EigKind::Complex(v) => v,
    };
    let peripheral: Vec<(f64, f64)> = eigenvalues
        .iter()
        .filter(|z| (z.re - lambda0).abs() <= KERNEL_CLUSTER_TOL && z.im.abs() > KERNEL_CLUSTER_TOL)
        .map(|z| (z.re, z.im))
        .collect();

    if lambda0 < -DECAY_TOL {
        return Ok(ClassificationReport {
            class: AsymptoticClass::DecayToZero,
            spectral_bound: lambda0,
            kernel_dim: 0,
            peripheral,
        });
    }
    let kernel_dim = eigenvalues
        .iter()
        .filter(|z| (*z - Complex::new(lambda0, 0.0)).norm() <= KERNEL_CLUSTER_TOL)
        .count();
    let class = if kernel_dim <= 1 {
        AsymptoticClass::ConvergesRank1
    } else {
        AsymptoticClass::NotConvergentMulti
    };
    Ok(ClassificationReport {
        class,
        spectral_bound: lambda0,
        kernel_dim,
        peripheral,
    })
}
