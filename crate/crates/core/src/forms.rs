//! Finite-element assembly of bilinear forms on an interval.
//!
//! Forms are `a(u, v) = int u' v' + int V u v + (boundary coupling)` with
//! piecewise-linear (hat-function) elements on a uniform grid and a lumped
//! (row-sum, diagonal) mass matrix. Lumping preserves the discrete maximum
//! principle: the consistent P1 mass matrix would break the Metzler property
//! of `A = -M^{-1} K` and create spurious positivity violations.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, inf_norm, max_abs, sym_eigenvalues, DMat, DVec};
use crate::semigroup::{
    convergence_profile, equilibrium_projection, fit_exponential_rate, spectral_overview, Generator,
};

/// Minimal generalized eigenvalue accepted as "strictly positive" in the
/// ellipticity search; keeps the constant-vector zero mode of Neumann forms
/// from being mistaken for coercivity.
const ALPHA_POSITIVE_TOL: f64 = 1e-9;

/// Largest omega tried by the dyadic ellipticity search.
const OMEGA_MAX: f64 = 65536.0;

type Potential = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Declarative description of a bilinear form on an interval: gradient part,
/// optional scalar potential, optional 2x2 coupling of the endpoint values.
#[derive(Clone)]
pub struct FormSpec {
    x_left: f64,
    x_right: f64,
    n_cells: usize,
    potential: Option<Potential>,
    boundary_matrix: Option<[[f64; 2]; 2]>,
    label: String,
}

impl FormSpec {
    pub fn new(x_left: f64, x_right: f64, n_cells: usize) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite()) || x_left >= x_right {
            return Err(Error::invalid(format!(
                "interval ({x_left}, {x_right}) must be finite with x_left < x_right"
            )));
        }
        if n_cells < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        Ok(FormSpec {
            x_left,
            x_right,
            n_cells,
            potential: None,
            boundary_matrix: None,
            label: String::from("form"),
        })
    }

    pub fn with_potential(mut self, v: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.potential = Some(Arc::new(v));
        self
    }

    pub fn with_boundary_matrix(mut self, b: [[f64; 2]; 2]) -> Self {
        self.boundary_matrix = Some(b);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn h(&self) -> f64 {
        (self.x_right - self.x_left) / self.n_cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.h()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl std::fmt::Debug for FormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormSpec")
            .field("x_left", &self.x_left)
            .field("x_right", &self.x_right)
            .field("n_cells", &self.n_cells)
            .field("has_potential", &self.potential.is_some())
            .field("boundary_matrix", &self.boundary_matrix)
            .field("label", &self.label)
            .finish()
    }
}

/// Assembled stiffness, lumped mass weights, and the matrix realizing the
/// V-norm `||u||_H^2 + (gradient energy)`.
#[derive(Debug, Clone)]
pub struct AssembledForm {
    stiffness: DMat,
    mass: DVec,
    vnorm: DMat,
    label: String,
}

impl AssembledForm {
    pub fn stiffness(&self) -> &DMat {
        &self.stiffness
    }

    pub fn mass(&self) -> &DVec {
        &self.mass
    }

    pub fn vnorm(&self) -> &DMat {
        &self.vnorm
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn stiffness_symmetric_part(&self) -> DMat {
        let k = &self.stiffness;
        DMat::from_fn(k.nrows(), k.ncols(), |i, j| 0.5 * (k[(i, j)] + k[(j, i)]))
    }
}

/// Assemble a [`FormSpec`] with P1 elements on the uniform grid.
///
/// `K = (gradient stiffness) + diag(M_i V(x_i)) + boundary coupling at the
/// two endpoint degrees of freedom`; `M` is the lumped mass; the V-norm
/// matrix is the gradient stiffness plus `diag(M)`.
pub fn assemble(spec: &FormSpec) -> Result<AssembledForm> {
    let n = spec.n_nodes();
    let h = spec.h();
    let mut k_grad = DMat::zeros(n, n);
    for cell in 0..spec.n_cells {
        let (a, b) = (cell, cell + 1);
        k_grad[(a, a)] += 1.0 / h;
        k_grad[(b, b)] += 1.0 / h;
        k_grad[(a, b)] -= 1.0 / h;
        k_grad[(b, a)] -= 1.0 / h;
    }
    let mut mass = DVec::zeros(n);
    for cell in 0..spec.n_cells {
        mass[cell] += 0.5 * h;
        mass[cell + 1] += 0.5 * h;
    }

    let mut stiffness = k_grad.clone();
    if let Some(v) = &spec.potential {
        for i in 0..n {
            let x = spec.node(i);
            let vx = v(x);
            if !vx.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("potential at node {i} (x = {x})"),
                });
            }
            stiffness[(i, i)] += mass[i] * vx;
        }
    }
    if let Some(b) = spec.boundary_matrix {
        let last = n - 1;
        stiffness[(0, 0)] += b[0][0];
        stiffness[(0, last)] += b[0][1];
        stiffness[(last, 0)] += b[1][0];
        stiffness[(last, last)] += b[1][1];
    }

    let mut vnorm = k_grad;
    for i in 0..n {
        vnorm[(i, i)] += mass[i];
    }
    Ok(AssembledForm {
        stiffness,
        mass,
        vnorm,
        label: spec.label.clone(),
    })
}

/// Generator associated with the form: `A = -M^{-1} K` with the lumped mass
/// as the weights of the discrete measure. `A` is self-adjoint in the
/// M-weighted pairing exactly when `K` is symmetric.
pub fn generator_from_form(form: &AssembledForm) -> Generator {
    let n = form.dim();
    let a = DMat::from_fn(n, n, |i, j| -form.stiffness[(i, j)] / form.mass[i]);
    Generator::new(a, form.mass.clone(), form.label.clone())
        .expect("assembled form yields a valid generator")
}

/// The pair `(alpha, omega)` realizing `a(u,u) + omega ||u||_H^2 >= alpha ||u||_V^2`.
#[derive(Debug, Clone, Copy)]
pub struct EllipticityConstants {
    pub alpha: f64,
    pub omega: f64,
    /// True when `omega = 0` already works, i.e. the form is positive-coercive.
    pub positive_coercive: bool,
}

/// Search the dyadic grid `omega in {0, 1, 2, 4, ...}` for the first shift
/// making the form elliptic against the V-norm; returns the generalized
/// minimal eigenvalue `alpha(omega)` at that shift.
pub fn ellipticity_constants(form: &AssembledForm) -> Result<EllipticityConstants> {
    let k_sym = form.stiffness_symmetric_part();
    let chol = cholesky_factor(form.vnorm())?;
    let mut omega = 0.0_f64;
    loop {
        let mut shifted = k_sym.clone();
        for i in 0..form.dim() {
            shifted[(i, i)] += omega * form.mass[i];
        }
        let alpha = min_generalized_eigenvalue(&shifted, &chol);
        if alpha > ALPHA_POSITIVE_TOL {
            return Ok(EllipticityConstants {
                alpha,
                omega,
                positive_coercive: omega == 0.0,
            });
        }
        omega = if omega == 0.0 { 1.0 } else { omega * 2.0 };
        if omega > OMEGA_MAX {
            return Err(Error::NotElliptic {
                omega_max: OMEGA_MAX,
            });
        }
    }
}

/// Decay rate `delta = alpha / c_H` guaranteed by positive-coercivity, where
/// `c_H` is the smallest constant with `||u||_H^2 <= c_H ||u||_V^2`.
///
/// Refuses forms that are not positive-coercive and alpha values that exceed
/// the certified ellipticity constant.
pub fn coercive_decay_bound(alpha: f64, form: &AssembledForm) -> Result<f64> {
    let k_sym = form.stiffness_symmetric_part();
    let chol = cholesky_factor(form.vnorm())?;
    let alpha0 = min_generalized_eigenvalue(&k_sym, &chol);
    if alpha0 <= ALPHA_POSITIVE_TOL {
        return Err(Error::NotCoercive { alpha0 });
    }
    if !alpha.is_finite() || alpha <= 0.0 || alpha > alpha0 * (1.0 + 1e-8) {
        return Err(Error::invalid(format!(
            "alpha = {alpha:.6e} is not certified by this form (alpha(0) = {alpha0:.6e})"
        )));
    }
    let m_diag = DMat::from_fn(form.dim(), form.dim(), |i, j| {
        if i == j {
            form.mass[i]
        } else {
            0.0
        }
    });
    let c_h = max_generalized_eigenvalue(&m_diag, &chol);
    Ok(alpha / c_h)
}

/// Sampled check of the positive/negative-part coupling of the form.
///
/// Each sample `u` is split coefficientwise into `u_plus = max(u, 0)` and
/// `u_minus = min(u, 0)`, and `q = u_plus^T K u_minus` is evaluated. Since
/// the parts have complementary supports, `q = sum_{i != j} K_ij u+_i u-_j`,
/// which is nonnegative for every `u` exactly when the off-diagonal
/// stiffness entries are nonpositive, i.e. when `-M^{-1} K` is Metzler and
/// the semigroup is positive. Half of the samples are dense, half are sparse
/// two-point sign patterns, which probe individual couplings directly.
#[derive(Debug, Clone, Copy)]
pub struct BeurlingDenyReport {
    pub min_q: f64,
    pub threshold: f64,
    /// True when no sampled `q` fell below `-threshold`.
    pub satisfied: bool,
    pub samples: usize,
}

pub fn beurling_deny_check(
    form: &AssembledForm,
    sample_count: usize,
) -> Result<BeurlingDenyReport> {
    if sample_count == 0 {
        return Err(Error::invalid(
            "sample_count must be at least 1".to_string(),
        ));
    }
    let n = form.dim();
    let k = form.stiffness();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB05E_ED01);
    let mut min_q = f64::INFINITY;
    for sample in 0..sample_count {
        let u = if sample % 2 == 0 {
            DVec::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
        } else {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            if j == i {
                j = (j + 1) % n;
            }
            let mut v = DVec::zeros(n);
            v[i] = 1.0;
            v[j] = -1.0;
            v
        };
        let u_plus = u.map(|x| x.max(0.0));
        let u_minus = u.map(|x| x.min(0.0));
        let q = (u_plus.transpose() * k * u_minus)[(0, 0)];
        min_q = min_q.min(q);
    }
    let threshold = 1e-10 * inf_norm(k);
    Ok(BeurlingDenyReport {
        min_q,
        threshold,
        satisfied: min_q >= -threshold,
        samples: sample_count,
    })
}

/// Trend of the spectral gap across a domain or mesh sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapTrend {
    /// Gap changed by less than 10% between the last two sizes.
    Stable,
    /// Gap at least halved between the last two sizes.
    Collapsing,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub size: f64,
    pub spectral_bound: f64,
    pub gap: Option<f64>,
    pub delta_fit: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `None` for a single-row sweep.
    pub trend: Option<GapTrend>,
    /// Gap of the second-to-last row divided by the gap of the last row.
    pub collapse_factor: Option<f64>,
}

/// Rebuild a scenario at each size and record spectral bound, gap and fitted
/// rate. Stable gaps indicate confinement; on a free domain the gap must
/// collapse as the domain grows.
pub fn sweep_domain(build: impl Fn(f64) -> Result<Generator>, sizes: &[f64]) -> Result<SweepTable> {
    if sizes.is_empty() {
        return Err(Error::invalid("sweep needs at least one size".to_string()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let g = build(size)?;
        let ov = spectral_overview(&g)?;
        let gap = ov.gap().filter(|d| *d > 1e-12);
        let delta_fit = match gap {
            Some(gp) if ov.simple() => {
                let times: Vec<f64> = (1..=8).map(|k| 0.45 * k as f64 / gp).collect();
                let proj = equilibrium_projection(&g)?;
                let profile = convergence_profile(&g, &proj, &times)?;
                fit_exponential_rate(&profile).ok().map(|f| f.rate)
            }
            _ => None,
        };
        rows.push(SweepRow {
            size,
            spectral_bound: ov.lambda0,
            gap,
            delta_fit,
        });
    }
    let (trend, collapse_factor) = if rows.len() >= 2 {
        let prev = rows[rows.len() - 2].gap;
        let last = rows[rows.len() - 1].gap;
        match (prev, last) {
            (Some(p), Some(l)) if l > 0.0 => {
                let change = (l / p - 1.0).abs();
                let factor = p / l;
                let trend = if change < 0.10 {
                    GapTrend::Stable
                } else if factor >= 2.0 {
                    GapTrend::Collapsing
                } else {
                    GapTrend::Mixed
                };
                (Some(trend), Some(factor))
            }
            _ => (Some(GapTrend::Mixed), None),
        }
    } else {
        (None, None)
    };
    Ok(SweepTable {
        rows,
        trend,
        collapse_factor,
    })
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
fn cholesky_factor(m: &DMat) -> Result<DMat> {
    let n = m.nrows();
    if asymmetry(m) > 1e-10 * max_abs(m).max(1.0) {
        return Err(Error::invalid(
            "V-norm matrix must be symmetric".to_string(),
        ));
    }
    let mut l = DMat::zeros(n, n);
    for j in 0..n {
        let mut diag = m[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag <= 0.0 {
            return Err(Error::invalid(format!(
                "V-norm matrix is not positive definite (pivot {diag:.3e} at {j})"
            )));
        }
        l[(j, j)] = diag.sqrt();
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    Ok(l)
}

/// Smallest eigenvalue of `L^{-1} S L^{-T}` for symmetric `S` and the
/// Cholesky factor `L` of the metric.
fn min_generalized_eigenvalue(s: &DMat, l: &DMat) -> f64 {
    *generalized_spectrum(s, l)
        .first()
        .expect("nonempty spectrum")
}

fn max_generalized_eigenvalue(s: &DMat, l: &DMat) -> f64 {
    *generalized_spectrum(s, l)
        .last()
        .expect("nonempty spectrum")
}

fn generalized_spectrum(s: &DMat, l: &DMat) -> Vec<f64> {
    let t1 = l
        .clone()
        .solve_lower_triangular(s)
        .expect("Cholesky factor is nonsingular");
    let c = l
        .clone()
        .solve_lower_triangular(&t1.transpose())
        .expect("Cholesky factor is nonsingular");
    sym_eigenvalues(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use crate::semigroup::{is_metzler, spectral_bound};

    /// Two P1 elements on (0,1): h = 1/2, stiffness (1/h) tridiag(-1, 2, -1)
    /// with free ends, lumped mass (h/2, h, h/2).
    #[test]
    fn hand_assembled_two_cell_form() {
        let spec = FormSpec::new(0.0, 1.0, 2).unwrap();
        let form = assemble(&spec).unwrap();
        let expected_k = nalgebra::dmatrix![
            2.0, -2.0, 0.0;
            -2.0, 4.0, -2.0;
            0.0, -2.0, 2.0
        ];
        assert_eq!(form.stiffness(), &expected_k);
        assert_eq!(form.mass().as_slice(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn unit_potential_adds_lumped_mass_to_diagonal() {
        let plain = assemble(&FormSpec::new(0.0, 1.0, 4).unwrap()).unwrap();
        let with_pot =
            assemble(&FormSpec::new(0.0, 1.0, 4).unwrap().with_potential(|_| 1.0)).unwrap();
        for i in 0..plain.dim() {
            let diff = with_pot.stiffness()[(i, i)] - plain.stiffness()[(i, i)];
            assert!((diff - plain.mass()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_matrix_hits_the_four_corners() {
        let b = [[1.0, 1.0], [1.0, 1.0]];
        let plain = assemble(&FormSpec::new(0.0, 1.0, 8).unwrap()).unwrap();
        let coupled =
            assemble(&FormSpec::new(0.0, 1.0, 8).unwrap().with_boundary_matrix(b)).unwrap();
        let n = plain.dim();
        let diff = coupled.stiffness() - plain.stiffness();
        for i in 0..n {
            for j in 0..n {
                let expected = if (i == 0 || i == n - 1) && (j == 0 || j == n - 1) {
                    1.0
                } else {
                    0.0
                };
                assert!((diff[(i, j)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn neumann_generator_annihilates_constants() {
        let form = assemble(&FormSpec::new(0.0, 1.0, 2).unwrap()).unwrap();
        let g = generator_from_form(&form);
        let ones = DVec::from_element(3, 1.0);
        assert!((g.matrix() * ones).norm() < 1e-13);
        assert!(g.is_self_adjoint());
    }

    #[test]
    fn endpoint_coupling_breaks_constant_kernel() {
        // a(1, v) = 2 (v(0) + v(1)) for the all-ones boundary matrix, so
        // constants are not in the kernel.
        let form = assemble(
            &FormSpec::new(0.0, 1.0, 8)
                .unwrap()
                .with_boundary_matrix([[1.0, 1.0], [1.0, 1.0]]),
        )
        .unwrap();
        let g = generator_from_form(&form);
        let n = g.dim();
        let ones = DVec::from_element(n, 1.0);
        assert!((g.matrix() * ones).norm() > 1.0);
    }

    #[test]
    fn unit_potential_form_is_coercive_with_alpha_one() {
        // With potential 1 the stiffness equals the V-norm matrix exactly,
        // so the minimal generalized eigenvalue at omega = 0 is 1.
        let form = assemble(&FormSpec::new(0.0, 1.0, 16).unwrap().with_potential(|_| 1.0)).unwrap();
        let c = ellipticity_constants(&form).unwrap();
        assert!(c.positive_coercive);
        assert_eq!(c.omega, 0.0);
        assert!((c.alpha - 1.0).abs() < 1e-10);
    }

    #[test]
    fn neumann_gradient_form_needs_a_shift() {
        // Constants witness alpha(0) = 0; the search must move to omega >= 1.
        let form = assemble(&FormSpec::new(0.0, 1.0, 16).unwrap()).unwrap();
        let c = ellipticity_constants(&form).unwrap();
        assert!(!c.positive_coercive);
        assert!(c.omega >= 1.0);
        assert!(c.alpha > 0.0);
    }

    #[test]
    fn decay_bound_refuses_non_coercive_form() {
        let form = assemble(&FormSpec::new(0.0, 1.0, 16).unwrap()).unwrap();
        assert!(matches!(
            coercive_decay_bound(0.5, &form),
            Err(Error::NotCoercive { .. })
        ));
    }

    #[test]
    fn decay_bound_is_respected_by_the_semigroup() {
        let form = assemble(&FormSpec::new(0.0, 1.0, 24).unwrap().with_potential(|_| 1.0)).unwrap();
        let c = ellipticity_constants(&form).unwrap();
        let delta = coercive_decay_bound(c.alpha, &form).unwrap();
        let g = generator_from_form(&form);
        // Constant potential shifts the whole spectrum: spb = -1 exactly.
        let spb = spectral_bound(&g).unwrap();
        assert!((spb + 1.0).abs() < 1e-10);
        assert!(delta <= -spb + 1e-10);
        for &t in &[0.5, 2.0] {
            let s = expm(g.matrix(), t).unwrap();
            let norm = g.weighted_operator_norm(&s);
            assert!(
                norm <= (-delta * t).exp() * (1.0 + 1e-8),
                "||S({t})|| = {norm} above exp(-{delta} t)"
            );
        }
    }

    /// On the 2-node mesh the split of u = (1, -1) gives
    /// q = u+^T K u- = K_01 * 1 * (-1) = +1/h, which is nonnegative.
    #[test]
    fn positive_negative_coupling_by_hand_on_two_nodes() {
        let spec = FormSpec::new(0.0, 1.0, 2).unwrap();
        let form = assemble(&spec).unwrap();
        let u = nalgebra::dvector![1.0, 0.0, -1.0];
        let u_plus = u.map(|x: f64| x.max(0.0));
        let u_minus = u.map(|x: f64| x.min(0.0));
        let q = (u_plus.transpose() * form.stiffness() * u_minus)[(0, 0)];
        // Nodes 0 and 2 are not adjacent on this mesh; coupling is zero.
        assert_eq!(q, 0.0);
        let v = nalgebra::dvector![1.0, -1.0, 0.0];
        let v_plus = v.map(|x: f64| x.max(0.0));
        let v_minus = v.map(|x: f64| x.min(0.0));
        let qv = (v_plus.transpose() * form.stiffness() * v_minus)[(0, 0)];
        assert!((qv - 2.0).abs() < 1e-14, "q = -K_01 = 1/h = 2, got {qv}");
    }

    #[test]
    fn endpoint_sign_pattern_violates_the_criterion_on_the_coupled_form() {
        let form = assemble(
            &FormSpec::new(0.0, 1.0, 16)
                .unwrap()
                .with_boundary_matrix([[1.0, 1.0], [1.0, 1.0]]),
        )
        .unwrap();
        let n = form.dim();
        let mut u = DVec::zeros(n);
        u[0] = 1.0;
        u[n - 1] = -1.0;
        let u_plus = u.map(|x: f64| x.max(0.0));
        let u_minus = u.map(|x: f64| x.min(0.0));
        let q = (u_plus.transpose() * form.stiffness() * u_minus)[(0, 0)];
        assert!(
            q < -0.5,
            "endpoint coupling must violate the criterion, q = {q}"
        );
        // The generator is accordingly not Metzler.
        let g = generator_from_form(&form);
        assert!(!is_metzler(&g, 1e-12).metzler);
    }

    #[test]
    fn nonnegative_vectors_have_zero_coupling() {
        let form = assemble(&FormSpec::new(0.0, 1.0, 8).unwrap()).unwrap();
        let u = DVec::from_fn(form.dim(), |i, _| (i as f64 * 0.7).sin().abs());
        let u_minus = u.map(|x: f64| x.min(0.0));
        assert_eq!(u_minus.norm(), 0.0);
    }

    #[test]
    fn sampled_criterion_clears_a_metzler_form() {
        let form = assemble(
            &FormSpec::new(0.0, 2.0, 20)
                .unwrap()
                .with_potential(|x| 1.0 + x * x),
        )
        .unwrap();
        let report = beurling_deny_check(&form, 200).unwrap();
        assert!(report.satisfied, "min_q = {}", report.min_q);
    }

    #[test]
    fn sampled_criterion_rejects_zero_samples() {
        let form = assemble(&FormSpec::new(0.0, 1.0, 4).unwrap()).unwrap();
        assert!(beurling_deny_check(&form, 0).is_err());
    }

    #[test]
    fn endpoint_coupled_form_is_positive_coercive() {
        // The coupled quadratic form int u'^2 + (u(0)+u(1))^2 vanishes only
        // at u = 0, so the stiffness is positive definite and the form is
        // coercive without any shift.
        let form = assemble(
            &FormSpec::new(0.0, 1.0, 32)
                .unwrap()
                .with_boundary_matrix([[1.0, 1.0], [1.0, 1.0]]),
        )
        .unwrap();
        let c = ellipticity_constants(&form).unwrap();
        assert!(c.positive_coercive, "alpha(0) = {}", c.alpha);
        assert!(c.alpha > 0.0);
        let delta = coercive_decay_bound(c.alpha, &form).unwrap();
        let g = generator_from_form(&form);
        let spb = spectral_bound(&g).unwrap();
        assert!(
            delta > 0.0 && delta <= -spb + 1e-10,
            "delta {delta} vs spb {spb}"
        );
    }

    #[test]
    fn single_size_sweep_has_no_trend() {
        let table = sweep_domain(
            |l| {
                let form = assemble(&FormSpec::new(0.0, l, 16).unwrap())?;
                Ok(generator_from_form(&form))
            },
            &[1.0],
        )
        .unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.trend.is_none());
    }
}
