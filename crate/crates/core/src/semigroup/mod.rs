//! Perron-Frobenius analysis layer for matrix semigroups `t -> exp(t A)`.
//!
//! A [`Generator`] is a square real matrix together with strictly positive
//! mass weights realizing the discrete measure of the underlying weighted
//! `l^2` space. Self-adjointness is always meant with respect to that
//! weighted inner product; the plain-symmetric case is the special case of
//! uniform weights.
//!
//! Two infinite-dimensional distinctions degenerate at this scale and are
//! deliberately not modelled: every matrix against a discrete measure is an
//! integral (kernel) operator, so domination-by-a-kernel-operator
//! hypotheses hold automatically, and every operator is compact, so
//! essential-spectrum notions are empty. Spectral-gap stability under
//! domain sweeps serves as the finite surrogate for the latter.

mod equilibrium;

pub use equilibrium::{
    classify_asymptotics, convergence_profile, equilibrium_projection, fit_exponential_rate,
    spectral_bound, spectral_gap, AsymptoticClass, ClassificationReport, EquilibriumProjection,
    ExponentialFit, SemigroupEvaluator,
};

pub(crate) use equilibrium::spectral_overview;

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, ensure_finite, ensure_square, max_abs, spectral_norm, DMat, DVec};

/// Default absolute tolerance for off-diagonal sign tests and for the
/// thresholded sparsity digraph.
pub const METZLER_TOL: f64 = 1e-12;

/// A discretized semigroup generator: matrix, self-adjointness flag and the
/// weights of the discrete measure.
#[derive(Debug, Clone)]
pub struct Generator {
    matrix: DMat,
    symmetric: bool,
    mass_weights: DVec,
    label: String,
}

impl Generator {
    /// Build a generator, validating shape, finiteness and weight positivity.
    /// Self-adjointness with respect to the weighted pairing is detected
    /// automatically (relative asymmetry of `W A` below `1e-12`).
    pub fn new(matrix: DMat, mass_weights: DVec, label: impl Into<String>) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        ensure_finite(&matrix, "generator matrix")?;
        if mass_weights.len() != n {
            return Err(Error::invalid(format!(
                "mass weights length {} does not match matrix size {}",
                mass_weights.len(),
                n
            )));
        }
        for (i, &w) in mass_weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::invalid(format!(
                    "mass weight {i} must be strictly positive and finite, got {w}"
                )));
            }
        }
        let weighted = DMat::from_fn(n, n, |i, j| mass_weights[i] * matrix[(i, j)]);
        let scale = max_abs(&weighted);
        let symmetric = scale == 0.0 || asymmetry(&weighted) <= 1e-12 * scale;
        Ok(Generator {
            matrix,
            symmetric,
            mass_weights,
            label: label.into(),
        })
    }

    /// Generator over the counting measure (all-ones weights).
    pub fn with_unit_weights(matrix: DMat, label: impl Into<String>) -> Result<Self> {
        let n = matrix.nrows().max(1);
        Self::new(matrix, DVec::from_element(n, 1.0), label)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMat {
        &self.matrix
    }

    pub fn mass_weights(&self) -> &DVec {
        &self.mass_weights
    }

    /// True when the generator is self-adjoint in the mass-weighted pairing.
    pub fn is_self_adjoint(&self) -> bool {
        self.symmetric
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Similarity transform `D A D^{-1}` with `D = diag(sqrt(w))`, which is
    /// plain-symmetric exactly when the generator is weighted self-adjoint.
    /// The result is symmetrized entrywise.
    pub(crate) fn symmetrized(&self) -> DMat {
        let n = self.dim();
        let d: Vec<f64> = self.mass_weights.iter().map(|w| w.sqrt()).collect();
        let mut b = DMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = self.matrix[(i, j)] * d[i] / d[j];
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (b[(i, j)] + b[(j, i)]);
                b[(i, j)] = avg;
                b[(j, i)] = avg;
            }
        }
        b
    }

    pub(crate) fn sqrt_weights(&self) -> Vec<f64> {
        self.mass_weights.iter().map(|w| w.sqrt()).collect()
    }

    /// Operator norm of `X` on the weighted space: `||D X D^{-1}||_2`.
    pub fn weighted_operator_norm(&self, x: &DMat) -> f64 {
        let d = self.sqrt_weights();
        let scaled = DMat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * d[i] / d[j]);
        spectral_norm(&scaled)
    }
}

/// Verdict of the off-diagonal sign test, with the worst entry as witness.
#[derive(Debug, Clone, Copy)]
pub struct MetzlerReport {
    pub metzler: bool,
    /// Minimum off-diagonal entry; `0.0` for a 1x1 matrix.
    pub min_off_diagonal: f64,
}

/// A matrix generates a positive semigroup exactly when all off-diagonal
/// entries are nonnegative. The test admits entries down to `-tol`.
pub fn is_metzler(g: &Generator, tol: f64) -> MetzlerReport {
    let a = g.matrix();
    let n = g.dim();
    let mut min_off = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] < min_off {
                min_off = a[(i, j)];
            }
        }
    }
    if n == 1 {
        min_off = 0.0;
    }
    MetzlerReport {
        metzler: min_off >= -tol,
        min_off_diagonal: min_off,
    }
}

/// Irreducibility of the generated positive semigroup: strong connectivity
/// of the digraph with an edge `i -> j` whenever `A[j, i] > tol`, on the
/// absolute threshold [`METZLER_TOL`].
///
/// Calling this on a non-Metzler generator is refused: the notion only
/// applies to positive semigroups, and the caller should switch to the
/// eventual-positivity analysis instead.
pub fn is_irreducible(g: &Generator) -> Result<bool> {
    let report = is_metzler(g, METZLER_TOL);
    if !report.metzler {
        return Err(Error::NotMetzler {
            witness: report.min_off_diagonal,
        });
    }
    let a = g.matrix();
    let n = g.dim();
    if n == 1 {
        return Ok(true);
    }
    let mut forward: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut backward: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(j, i)] > METZLER_TOL {
                forward[i].push(j);
                backward[j].push(i);
            }
        }
    }
    Ok(reaches_all(&forward) && reaches_all(&backward))
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn gen(m: DMat) -> Generator {
        Generator::with_unit_weights(m, "test").unwrap()
    }

    #[test]
    fn metzler_accepts_nonnegative_offdiagonals() {
        let g = gen(dmatrix![-2.0, 1.0; 3.0, -5.0]);
        let r = is_metzler(&g, 0.0);
        assert!(r.metzler);
        assert!((r.min_off_diagonal - 1.0).abs() < 1e-15);
    }

    #[test]
    fn metzler_rejects_negative_offdiagonal_with_witness() {
        let g = gen(dmatrix![0.0, -1.0; 0.0, 0.0]);
        let r = is_metzler(&g, 0.0);
        assert!(!r.metzler);
        assert!((r.min_off_diagonal + 1.0).abs() < 1e-15);
    }

    #[test]
    fn decoupled_diagonal_is_reducible() {
        let g = gen(dmatrix![-1.0, 0.0; 0.0, -1.0]);
        assert!(!is_irreducible(&g).unwrap());
    }

    #[test]
    fn two_state_exchange_is_irreducible() {
        let g = gen(dmatrix![-1.0, 1.0; 1.0, -1.0]);
        assert!(is_irreducible(&g).unwrap());
    }

    #[test]
    fn dirichlet_path_graph_is_irreducible() {
        let n = 50;
        let h = 1.0 / (n as f64 + 1.0);
        let a = DMat::from_fn(n, n, |i, j| {
            if i == j {
                -2.0 / (h * h)
            } else if i.abs_diff(j) == 1 {
                1.0 / (h * h)
            } else {
                0.0
            }
        });
        let g = gen(a);
        assert!(is_irreducible(&g).unwrap());
    }

    #[test]
    fn irreducibility_refuses_non_metzler() {
        let g = gen(dmatrix![0.0, -1.0; 1.0, 0.0]);
        match is_irreducible(&g) {
            Err(Error::NotMetzler { witness }) => assert!((witness + 1.0).abs() < 1e-15),
            other => panic!("expected NotMetzler, got {other:?}"),
        }
    }

    #[test]
    fn weighted_self_adjointness_is_detected() {
        // A = -M^{-1} K with symmetric K and diagonal M is self-adjoint in
        // the M-weighted pairing but not plain-symmetric.
        let k = dmatrix![2.0, -2.0; -2.0, 2.0];
        let m = dvector![0.5, 1.0];
        let a = DMat::from_fn(2, 2, |i, j| -k[(i, j)] / m[i]);
        let g = Generator::new(a.clone(), m, "weighted").unwrap();
        assert!(g.is_self_adjoint());
        assert!(asymmetry(&a) > 0.1, "plain asymmetry should be visible");
        let b = g.symmetrized();
        assert!(asymmetry(&b) < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let a = dmatrix![0.0, 0.0; 0.0, 0.0];
        assert!(Generator::new(a, dvector![1.0, 0.0], "bad").is_err());
    }
}
