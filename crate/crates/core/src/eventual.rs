//! Eventual positivity of matrix semigroups.
//!
//! A semigroup can map the positive cone into itself only from some time
//! `t1` on, while having negative entries for small times. For self-adjoint
//! generators this is certified by two checkable hypotheses: every orbit
//! `|S(t0) e_i|` is dominated by a multiple of a fixed strictly positive
//! vector `u`, and the ground eigenvector `w` at the (simple) spectral bound
//! dominates a positive multiple of `u`. The scan below searches a geometric
//! time grid for the minimal positivity time of the rescaled semigroup
//! `R(t) = exp(-lambda0 t) S(t)`; the rescaling is positivity-neutral since
//! `exp(-lambda0 t) > 0`, and removes pure decay so long-time entries do not
//! underflow.

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, DVec};
use crate::semigroup::{equilibrium_projection, spectral_overview, Generator, SemigroupEvaluator};

/// Default relative entry tolerance: a sampled minimum above
/// `-eps * ||R(t)||_inf` counts as nonnegative.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Hypothesis (2) passes when the ground-eigenvector bound exceeds this.
const GROUND_BOUND_TOL: f64 = 1e-8;

/// Verdicts of hypothesis checks for eventual positivity of a self-adjoint
/// semigroup.
///
/// In finite dimensions the domination hypothesis is always formally
/// satisfiable (every entrywise quotient against a strictly positive `u` is
/// finite), so the report records the constant `C` rather than a pass/fail;
/// the ground-eigenvector bound is the discriminating test.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub self_adjoint: bool,
    /// The candidate quasi-interior point (entrywise strictly positive).
    pub u_ref: DVec,
    /// Probe time used for the domination test.
    pub probe_time: f64,
    /// `C = max_i || |S(t0) e_i| / u ||_inf` over all basis vectors.
    pub domination_constant: f64,
    /// Largest `c >= 0` with `w >= c u` entrywise for the sign-normalized
    /// ground eigenvector `w`; zero when no positive multiple works.
    pub eigenvector_bound_c: f64,
    pub lambda0_simple: bool,
    /// The ground eigenvector, when the spectral bound is simple.
    pub ground_vector: Option<DVec>,
}

impl HypothesisReport {
    /// Hypothesis (2): simple spectral bound with `w >= c u`, `c > 0`.
    pub fn ground_bound_holds(&self) -> bool {
        self.lambda0_simple && self.eigenvector_bound_c > GROUND_BOUND_TOL
    }
}

/// Check the two eventual-positivity hypotheses on a self-adjoint generator
/// against the candidate vector `u` at probe time `t0`.
pub fn check_eventual_positivity_hypotheses(
    g: &Generator,
    u: &DVec,
    t0: f64,
) -> Result<HypothesisReport> {
    if !g.is_self_adjoint() {
        return Err(Error::invalid(
            "the eventual-positivity criterion requires a self-adjoint generator".to_string(),
        ));
    }
    let n = g.dim();
    if u.len() != n {
        return Err(Error::invalid(format!(
            "reference vector length {} does not match generator size {n}",
            u.len()
        )));
    }
    if u.iter().any(|&x| !x.is_finite() || x <= 0.0) {
        return Err(Error::invalid(
            "reference vector must be entrywise strictly positive".to_string(),
        ));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::invalid(format!(
            "probe time must be positive, got {t0}"
        )));
    }

    let ev = SemigroupEvaluator::new(g)?;
    let s_t0 = ev.rescaled_at(t0)? * (ev.lambda0() * t0).exp();
    let mut domination_constant = 0.0_f64;
    for i in 0..n {
        let mut ratio = 0.0_f64;
        for j in 0..n {
            ratio = ratio.max(s_t0[(j, i)].abs() / u[j]);
        }
        domination_constant = domination_constant.max(ratio);
    }

    let (lambda0_simple, eigenvector_bound_c, ground_vector) = match equilibrium_projection(g) {
        Ok(p) => {
            let c = (0..n)
                .map(|j| p.u[j] / u[j])
                .fold(f64::INFINITY, f64::min)
                .max(0.0);
            (true, c, Some(p.u))
        }
        Err(Error::DominantNotSimple { .. }) => (false, 0.0, None),
        Err(e) => return Err(e),
    };

    Ok(HypothesisReport {
        self_adjoint: true,
        u_ref: u.clone(),
        probe_time: t0,
        domination_constant,
        eigenvector_bound_c,
        lambda0_simple,
        ground_vector,
    })
}

/// Default probe time for the domination test: one gap time-constant.
pub fn default_probe_time(g: &Generator) -> Result<f64> {
    let gap = spectral_overview(g)?.gap().filter(|d| *d > 1e-12);
    Ok(gap.map(|d| 1.0 / d).unwrap_or(1.0))
}

/// Gap-adaptive geometric time grid: 48 points from `1e-3 / gap` to
/// `50 / gap`. Sign changes happen on the gap timescale, so the grid spans
/// both the transient and the equilibrated regime.
pub fn default_time_grid(g: &Generator) -> Result<Vec<f64>> {
    let gap = spectral_overview(g)?
        .gap()
        .filter(|d| *d > 1e-12)
        .unwrap_or(1.0);
    Ok(geometric_grid(1e-3 / gap, 50.0 / gap, 48))
}

/// Geometric grid with the given endpoints (inclusive).
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    (0..points).map(|k| lo * ratio.powi(k as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityVerdict {
    /// All sampled minima nonnegative (within tolerance).
    Positive,
    /// Negative entries at small times, nonnegative from `t1` on.
    EventuallyPositive,
    /// Negative entries persist through the final sampled time.
    NotEventuallyPositive,
    /// The spectral bound is not simple; the scan cannot conclude.
    Inconclusive,
}

impl PositivityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            PositivityVerdict::Positive => "positive",
            PositivityVerdict::EventuallyPositive => "eventually_positive",
            PositivityVerdict::NotEventuallyPositive => "not_eventually_positive",
            PositivityVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Sampled positivity verdict for the rescaled semigroup.
///
/// The verdict is a statement about the sampled grid only — the series
/// records every sampled time, and no claim is made between samples.
#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    pub verdict: PositivityVerdict,
    /// `(t, min entry of exp(-lambda0 t) S(t))` along the grid.
    pub min_entry_series: Vec<(f64, f64)>,
    /// First grid time from which all sampled minima are nonnegative, when
    /// the verdict is positive or eventually positive.
    pub t1: Option<f64>,
    /// Optional domination constant carried by downstream certificates.
    pub domination_constant: Option<f64>,
    /// Relative entry tolerance used for the verdict.
    pub eps: f64,
    pub note: Option<String>,
}

/// Scan a geometric time grid for the minimal positivity time.
///
/// The grid must be geometric (consecutive ratios above 1.01), contain at
/// least 10 points, and span at least three decades.
pub fn minimal_positivity_time(
    g: &Generator,
    times: &[f64],
    eps: f64,
) -> Result<PositivityCertificate> {
    validate_geometric_grid(times)?;
    let simple = spectral_overview(g)?.simple();
    let ev = SemigroupEvaluator::new(g)?;
    scan_positivity(&ev, simple, times, eps)
}

/// Grid scan against a prebuilt evaluator; used by pipelines that already
/// paid for the spectral decomposition.
pub fn scan_positivity(
    ev: &SemigroupEvaluator,
    lambda0_simple: bool,
    times: &[f64],
    eps: f64,
) -> Result<PositivityCertificate> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::invalid(format!(
            "entry tolerance must be nonnegative, got {eps}"
        )));
    }
    let mut series = Vec::with_capacity(times.len());
    let mut ok_flags = Vec::with_capacity(times.len());
    for &t in times {
        let r = ev.rescaled_at(t)?;
        let min_entry = r.min();
        let threshold = eps * inf_norm(&r);
        series.push((t, min_entry));
        ok_flags.push(min_entry >= -threshold);
    }
    if !lambda0_simple {
        return Ok(PositivityCertificate {
            verdict: PositivityVerdict::Inconclusive,
            min_entry_series: series,
            t1: None,
            domination_constant: None,
            eps,
            note: Some(
                "dominant eigenvalue is not simple; the rescaled semigroup has no rank-one limit"
                    .to_string(),
            ),
        });
    }
    let last_violation = ok_flags.iter().rposition(|ok| !ok);
    let (verdict, t1) = match last_violation {
        None => (PositivityVerdict::Positive, Some(times[0])),
        Some(v) if v + 1 == times.len() => (PositivityVerdict::NotEventuallyPositive, None),
        Some(v) => (PositivityVerdict::EventuallyPositive, Some(times[v + 1])),
    };
    Ok(PositivityCertificate {
        verdict,
        min_entry_series: series,
        t1,
        domination_constant: None,
        eps,
        note: None,
    })
}

fn validate_geometric_grid(times: &[f64]) -> Result<()> {
    if times.len() < 10 {
        return Err(Error::invalid(format!(
            "positivity scan needs at least 10 grid points, got {}",
            times.len()
        )));
    }
    for (k, &t) in times.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::invalid(format!(
                "grid times must be positive, got {t} at index {k}"
            )));
        }
        if k > 0 {
            let ratio = t / times[k - 1];
            if ratio < 1.01 {
                return Err(Error::invalid(format!(
                    "grid must be geometric with ratio > 1, got ratio {ratio:.4} at index {k}"
                )));
            }
        }
    }
    let span = times[times.len() - 1] / times[0];
    if span < 1e3 {
        return Err(Error::invalid(format!(
            "grid must span at least three decades, got {span:.3e}"
        )));
    }
    Ok(())
}

/// The constant `c = min_i (exp(-lambda0 t) S(t) f)_i / u_i`: how strongly
/// the evolved state dominates a multiple of `u`. For generators passing
/// both hypotheses and `t` beyond the certificate's `t1`, `c` is positive.
pub fn strong_positivity_certificate(g: &Generator, u: &DVec, f: &DVec, t: f64) -> Result<f64> {
    let n = g.dim();
    if u.len() != n || f.len() != n {
        return Err(Error::invalid(
            "vector lengths do not match the generator size".to_string(),
        ));
    }
    if u.iter().any(|&x| !x.is_finite() || x <= 0.0) {
        return Err(Error::invalid(
            "reference vector must be entrywise strictly positive".to_string(),
        ));
    }
    if f.iter().any(|&x| !x.is_finite() || x < 0.0) || f.norm() == 0.0 {
        return Err(Error::invalid(
            "initial state must be nonnegative and nonzero".to_string(),
        ));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    let ev = SemigroupEvaluator::new(g)?;
    let evolved = ev.rescaled_at(t)? * f;
    Ok((0..n)
        .map(|i| evolved[i] / u[i])
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, DMat};
    use crate::semigroup::is_metzler;
    use nalgebra::{dmatrix, dvector};

    fn gen(m: DMat) -> Generator {
        Generator::with_unit_weights(m, "test").unwrap()
    }

    /// Symmetric with eigenstructure {0 on (1,1,1), -2 on (1,-1,0),
    /// -10 on (1,1,-2)}: one negative off-diagonal entry (-2/3) but a
    /// strictly positive dominant eigenvector.
    fn delayed_positivity_matrix() -> DMat {
        dmatrix![
            -8.0 / 3.0, -2.0 / 3.0, 10.0 / 3.0;
            -2.0 / 3.0, -8.0 / 3.0, 10.0 / 3.0;
            10.0 / 3.0, 10.0 / 3.0, -20.0 / 3.0
        ]
    }

    #[test]
    fn hypotheses_hold_for_two_state_exchange() {
        let g = gen(dmatrix![-1.0, 1.0; 1.0, -1.0]);
        let u = dvector![1.0, 1.0];
        let report = check_eventual_positivity_hypotheses(&g, &u, 1.0).unwrap();
        assert!(report.self_adjoint);
        assert!(report.lambda0_simple);
        // Ground vector (1,1)/sqrt(2) against u = (1,1): c = 1/sqrt(2).
        assert!((report.eigenvector_bound_c - 0.5_f64.sqrt()).abs() < 1e-10);
        assert!(report.ground_bound_holds());
        assert!(report.domination_constant.is_finite());
    }

    #[test]
    fn hypotheses_require_self_adjointness() {
        let g = gen(dmatrix![-1.0, 1.0; 2.0, -2.0]);
        let u = dvector![1.0, 1.0];
        assert!(check_eventual_positivity_hypotheses(&g, &u, 1.0).is_err());
    }

    #[test]
    fn metzler_generator_is_positive_from_the_first_grid_point() {
        let g = gen(dmatrix![-1.0, 1.0; 1.0, -1.0]);
        let grid = geometric_grid(1e-3, 10.0, 16);
        let cert = minimal_positivity_time(&g, &grid, DEFAULT_EPS).unwrap();
        assert_eq!(cert.verdict, PositivityVerdict::Positive);
        assert_eq!(cert.t1, Some(grid[0]));
    }

    #[test]
    fn delayed_positivity_is_detected_with_finite_t1() {
        let a = delayed_positivity_matrix();
        let g = gen(a.clone());
        assert!(!is_metzler(&g, 1e-12).metzler);

        // Brute-force oracle: the most negative entry is (0,1), equal to
        // 1/3 - exp(-2t)/2 + exp(-10t)/6. It is negative for small t and
        // crosses zero near t = 0.1497 (numerically solving f(t) = 0).
        let mut crossing = None;
        let mut prev_ok = false;
        for k in 0..4000 {
            let t = 1e-3 + k as f64 * 1e-3;
            let e = expm(&a, t).unwrap();
            let ok = e.min() >= -1e-12;
            if ok && !prev_ok {
                crossing = Some(t);
            }
            prev_ok = ok;
            if t > 1.0 {
                break;
            }
        }
        let t_star = crossing.expect("oracle must find a crossing");
        assert!((t_star - 0.1497).abs() < 5e-3, "oracle crossing {t_star}");

        let grid = default_time_grid(&g).unwrap();
        let cert = minimal_positivity_time(&g, &grid, DEFAULT_EPS).unwrap();
        assert_eq!(cert.verdict, PositivityVerdict::EventuallyPositive);
        let t1 = cert.t1.expect("finite t1");
        assert!(
            t1 >= 0.95 * t_star && t1 <= 1.35 * t_star,
            "t1 = {t1} vs oracle {t_star}"
        );
        // Hypotheses hold: one strictly positive dominant direction.
        let u = dvector![1.0, 1.0, 1.0];
        let report = check_eventual_positivity_hypotheses(&g, &u, 0.5).unwrap();
        assert!(report.ground_bound_holds());
        // Strong positivity at 2 t1 for every basis vector.
        for i in 0..3 {
            let mut f = DVec::zeros(3);
            f[i] = 1.0;
            let c = strong_positivity_certificate(&g, &u, &f, 2.0 * t1).unwrap();
            assert!(c > 0.0, "basis vector {i} gives c = {c}");
        }
    }

    #[test]
    fn rescaling_preserves_sign_patterns() {
        let a = delayed_positivity_matrix();
        let g = gen(a.clone());
        let ev = SemigroupEvaluator::new(&g).unwrap();
        for &t in &[0.05, 0.2, 1.0] {
            let plain = expm(&a, t).unwrap();
            let rescaled = ev.rescaled_at(t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let (p, r) = (plain[(i, j)], rescaled[(i, j)]);
                    if p.abs() > 1e-12 {
                        assert_eq!(p.signum(), r.signum(), "sign flip at ({i},{j}) t {t}");
                    }
                }
            }
        }
    }

    /// The rescaled semigroup converges entrywise to the rank-one limit, so
    /// the tail of the minimum-entry series approaches the smallest entry of
    /// the projection.
    #[test]
    fn min_entry_series_converges_to_projection_minimum() {
        let a = delayed_positivity_matrix();
        let g = gen(a);
        let p = crate::semigroup::equilibrium_projection(&g).unwrap();
        let limit = {
            let mut m = f64::INFINITY;
            for i in 0..3 {
                for j in 0..3 {
                    m = m.min(p.rank1[(i, j)]);
                }
            }
            m
        };
        assert!(limit > 0.0);
        let grid = default_time_grid(&g).unwrap();
        let cert = minimal_positivity_time(&g, &grid, DEFAULT_EPS).unwrap();
        let final_min = cert.min_entry_series.last().unwrap().1;
        assert!(
            (final_min - limit).abs() <= 0.10 * limit,
            "final min {final_min} vs projection minimum {limit}"
        );
    }

    #[test]
    fn grid_validation_rejects_short_and_linear_grids() {
        let g = gen(dmatrix![-1.0, 1.0; 1.0, -1.0]);
        let short: Vec<f64> = (1..=5).map(|k| k as f64).collect();
        assert!(minimal_positivity_time(&g, &short, DEFAULT_EPS).is_err());
        let linear: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        assert!(minimal_positivity_time(&g, &linear, DEFAULT_EPS).is_err());
    }

    #[test]
    fn strong_positivity_rejects_zero_state() {
        let g = gen(dmatrix![-1.0, 1.0; 1.0, -1.0]);
        let u = dvector![1.0, 1.0];
        let zero = dvector![0.0, 0.0];
        assert!(strong_positivity_certificate(&g, &u, &zero, 1.0).is_err());
    }

    #[test]
    fn strong_positivity_is_positive_for_perron_generators() {
        let g = gen(dmatrix![-2.0, 1.0, 1.0; 1.0, -2.0, 1.0; 1.0, 1.0, -2.0]);
        let u = dvector![1.0, 1.0, 1.0];
        let f = dvector![1.0, 2.0, 0.5];
        let c = strong_positivity_certificate(&g, &u, &f, 1.0).unwrap();
        assert!(c > 0.0);
    }
}
