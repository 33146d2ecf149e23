//! Scenario builders: the generator models under study.
//!
//! Every builder documents its truncation and meshing choices. Schrodinger
//! operators on the line are truncated to `[-L, L]` with homogeneous
//! Dirichlet walls (simplest wall with a provable eigenvalue upper bias) and
//! a second-order central-difference stencil; interval problems with natural
//! or coupled boundary conditions go through the form assembly.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{assemble, generator_from_form, FormSpec};
use crate::linalg::{sym_eig, DMat, DVec};
use crate::semigroup::Generator;

/// Uniform grid on `[x_left, x_right]` with `n_nodes` nodes.
#[derive(Debug, Clone, Copy)]
pub struct GridDescriptor {
    pub x_left: f64,
    pub x_right: f64,
    pub n_nodes: usize,
}

impl GridDescriptor {
    pub fn new(x_left: f64, x_right: f64, n_nodes: usize) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite()) || x_left >= x_right {
            return Err(Error::invalid(format!(
                "grid interval ({x_left}, {x_right}) must be finite and increasing"
            )));
        }
        if n_nodes < 3 {
            return Err(Error::invalid(format!(
                "grid needs at least 3 nodes, got {n_nodes}"
            )));
        }
        Ok(GridDescriptor {
            x_left,
            x_right,
            n_nodes,
        })
    }

    pub fn h(&self) -> f64 {
        (self.x_right - self.x_left) / (self.n_nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.h()
    }
}

/// The potential `(6x^2 - 2) / (1 + x^2)^2`, whose Schrodinger operator
/// `u'' - m u` annihilates the bump `w(x) = 1 / (1 + x^2)`:
/// `w'' = (6x^2 - 2) (1 + x^2)^{-3} = m w`.
pub fn lorentzian_well_potential(x: f64) -> f64 {
    let q = 1.0 + x * x;
    (6.0 * x * x - 2.0) / (q * q)
}

/// 1D Schrodinger generator `u -> u'' - m u` on `[-L, L]` with homogeneous
/// Dirichlet walls: `n` interior nodes, spacing `h = 2L/(n+1)`, second-order
/// central differences, the potential applied diagonally. Mass weights are
/// the uniform `h`.
pub fn schrodinger_1d(
    potential: impl Fn(f64) -> f64,
    half_width: f64,
    n: usize,
) -> Result<Generator> {
    build_schrodinger(potential, half_width, n, "schrodinger_1d")
}

fn build_schrodinger(
    potential: impl Fn(f64) -> f64,
    half_width: f64,
    n: usize,
    label: &str,
) -> Result<Generator> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::invalid(format!(
            "half-width must be positive, got {half_width}"
        )));
    }
    if n < 10 {
        return Err(Error::invalid(format!(
            "need at least 10 interior nodes, got {n}"
        )));
    }
    let h = 2.0 * half_width / (n as f64 + 1.0);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let x = -half_width + (i as f64 + 1.0) * h;
        let m = potential(x);
        if !m.is_finite() {
            return Err(Error::NonFinite {
                context: format!("potential at node {i} (x = {x})"),
            });
        }
        samples.push(m);
    }
    let inv_h2 = 1.0 / (h * h);
    let a = DMat::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 * inv_h2 - samples[i]
        } else if i.abs_diff(j) == 1 {
            inv_h2
        } else {
            0.0
        }
    });
    Generator::new(
        a,
        DVec::from_element(n, h),
        format!("{label}(L={half_width}, n={n})"),
    )
}

/// Absorption model: same stencil as [`schrodinger_1d`], but the potential
/// must be nonnegative and not identically zero on the grid. The spectral
/// bound is then strictly negative and the semigroup decays to zero.
pub fn absorption_1d(
    absorption: impl Fn(f64) -> f64,
    half_width: f64,
    n: usize,
) -> Result<Generator> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::invalid(format!(
            "half-width must be positive, got {half_width}"
        )));
    }
    if n < 10 {
        return Err(Error::invalid(format!(
            "need at least 10 interior nodes, got {n}"
        )));
    }
    let h = 2.0 * half_width / (n as f64 + 1.0);
    let mut any_positive = false;
    for i in 0..n {
        let x = -half_width + (i as f64 + 1.0) * h;
        let m = absorption(x);
        if !m.is_finite() {
            return Err(Error::NonFinite {
                context: format!("absorption term at node {i} (x = {x})"),
            });
        }
        if m < 0.0 {
            return Err(Error::invalid(format!(
                "absorption term must be nonnegative, got {m} at node {i} (x = {x})"
            )));
        }
        if m > 0.0 {
            any_positive = true;
        }
    }
    if !any_positive {
        return Err(Error::invalid(
            "absorption term is identically zero on the grid".to_string(),
        ));
    }
    build_schrodinger(absorption, half_width, n, "absorption_1d")
}

/// Laplacian on (0,1) with the endpoint-coupling boundary matrix
/// [[1,1],[1,1]]; assembled through the form layer. Not Metzler: the
/// coupling injects negative off-diagonal entries.
pub fn nonlocal_laplace_interval(n_cells: usize) -> Result<Generator> {
    if n_cells < 4 {
        return Err(Error::invalid(format!(
            "need at least 4 cells, got {n_cells}"
        )));
    }
    let spec = FormSpec::new(0.0, 1.0, n_cells)?
        .with_boundary_matrix([[1.0, 1.0], [1.0, 1.0]])
        .with_label(format!("nonlocal_laplace_interval(n={n_cells})"));
    let form = assemble(&spec)?;
    Ok(generator_from_form(&form))
}

/// Uniform probability weights over `n` interior nodes.
pub fn uniform_jump_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Diffusion on (0,1) whose boundary values are eliminated through the
/// discrete constraint `u(boundary) = sum_j weights_j u(x_j)`: when a
/// particle reaches an endpoint it jumps back into the interior with the
/// given probabilities. Each weight vector must be a probability vector over
/// the interior nodes; the constant vector is then fixed by construction
/// (rows of the eliminated generator sum to zero).
pub fn nonlocal_dirichlet_diffusion(
    n: usize,
    left_weights: &[f64],
    right_weights: &[f64],
) -> Result<Generator> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 interior nodes, got {n}"
        )));
    }
    for (side, w) in [("left", left_weights), ("right", right_weights)] {
        if w.len() != n {
            return Err(Error::invalid(format!(
                "{side} jump weights have length {}, expected {n}",
                w.len()
            )));
        }
        let mut total = 0.0;
        for (j, &p) in w.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!(
                    "{side} jump weight {j} must be a nonnegative probability, got {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "{side} jump weights sum to {total}, expected 1 within 1e-12"
            )));
        }
    }
    let h = 1.0 / (n as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let mut a = DMat::zeros(n, n);
    for i in 0..n {
        if i > 0 {
            a[(i, i - 1)] = inv_h2;
        }
        if i + 1 < n {
            a[(i, i + 1)] = inv_h2;
        }
    }
    for j in 1..n {
        a[(0, j)] += left_weights[j] * inv_h2;
    }
    for j in 0..n - 1 {
        a[(n - 1, j)] += right_weights[j] * inv_h2;
    }
    // Conservation by construction: the diagonal is the negated compensated
    // off-diagonal row sum. For interior rows this is the stencil's -2/h^2;
    // for the boundary rows it equals -(2 - w_self)/h^2, i.e. the self-jump
    // mass lands on the diagonal, and any rounding defect of the weight sum
    // is absorbed instead of leaking into the row sums.
    for i in 0..n {
        let off_sum = neumaier_sum((0..n).filter(|&j| j != i).map(|j| a[(i, j)]));
        a[(i, i)] = -off_sum;
    }
    Generator::new(
        a,
        DVec::from_element(n, h),
        format!("nonlocal_dirichlet_diffusion(n={n})"),
    )
}

/// Neumaier-compensated summation.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut compensation = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

type MatrixSampler = Arc<dyn Fn(f64) -> DMat + Send + Sync>;

/// Matrix potential for coupled diffusion systems: a sampler
/// `x -> V(x) in R^{NxN}` together with the strictly positive common kernel
/// direction `c`. Every sample must be symmetric, negative semidefinite,
/// and have kernel exactly `span{c}`.
#[derive(Clone)]
pub struct MatrixPotentialSpec {
    block_size: usize,
    sampler: MatrixSampler,
    kernel_vector: DVec,
}

impl MatrixPotentialSpec {
    pub fn new(
        block_size: usize,
        sampler: impl Fn(f64) -> DMat + Send + Sync + 'static,
        kernel_vector: DVec,
    ) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::invalid("block size must be at least 1".to_string()));
        }
        if kernel_vector.len() != block_size {
            return Err(Error::invalid(format!(
                "kernel vector length {} does not match block size {block_size}",
                kernel_vector.len()
            )));
        }
        for (i, &c) in kernel_vector.iter().enumerate() {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::invalid(format!(
                    "kernel vector entry {i} must be strictly positive, got {c}"
                )));
            }
        }
        Ok(MatrixPotentialSpec {
            block_size,
            sampler: Arc::new(sampler),
            kernel_vector,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn kernel_vector(&self) -> &DVec {
        &self.kernel_vector
    }

    /// Sample `V(x)` and verify the structural invariants: symmetry,
    /// negative semidefiniteness (largest eigenvalue <= 1e-10), a
    /// one-dimensional kernel (second-smallest |eigenvalue| >= 1e-6,
    /// smallest <= 1e-10) spanned by the kernel direction (angle <= 1e-6).
    pub fn validate_at(&self, x: f64) -> Result<DMat> {
        let n = self.block_size;
        let v = (self.sampler)(x);
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::invalid(format!(
                "potential sample at x = {x} has shape {}x{}, expected {n}x{n}",
                v.nrows(),
                v.ncols()
            )));
        }
        let eig = sym_eig(&v)
            .map_err(|e| Error::invalid(format!("potential sample at x = {x} is invalid: {e}")))?;
        let top = eig.eigenvalues[n - 1];
        if top > 1e-10 {
            return Err(Error::invalid(format!(
                "potential sample at x = {x} is not negative semidefinite \
                 (largest eigenvalue {top:.3e})"
            )));
        }
        if top.abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "potential sample at x = {x} has no kernel \
                 (eigenvalue closest to zero is {top:.3e})"
            )));
        }
        if n >= 2 {
            let second = eig.eigenvalues[n - 2].abs();
            if second < 1e-6 {
                return Err(Error::invalid(format!(
                    "potential sample at x = {x} has a kernel of dimension >= 2 \
                     (second-smallest |eigenvalue| {second:.3e})"
                )));
            }
        }
        let kernel_mode = eig.eigenvectors.column(n - 1);
        let c = &self.kernel_vector;
        let cosine = kernel_mode.dot(c).abs() / (kernel_mode.norm() * c.norm());
        let angle = cosine.min(1.0).acos();
        if angle > 1e-6 {
            return Err(Error::invalid(format!(
                "kernel of the potential sample at x = {x} is not parallel to the \
                 kernel direction (angle {angle:.3e})"
            )));
        }
        Ok(v)
    }
}

/// The reference coupling used by the system scenario: an x-independent
/// negative-semidefinite integer matrix whose kernel is exactly the all-ones
/// direction.
///
/// For `block_size = 3` this is `V = -(4 v1 v1^T + v2 v2^T)` with
/// `v1 = (1,1,-2)` and `v2 = (2,-1,-1)`, both orthogonal to `(1,1,1)`; its
/// `(0,1)` entry is `-(4*1*1 + 2*(-1)) = -2 < 0`, so the system semigroup is
/// not positive. Other block sizes use the difference family
/// `v_k = e_k - e_{k+1}` with weights `k + 2`, which has the same structure.
/// All entries are integers, so the kernel relation `V 1 = 0` is exact in
/// floating point.
pub fn reference_system_potential(block_size: usize) -> Result<MatrixPotentialSpec> {
    if block_size == 0 {
        return Err(Error::invalid("block size must be at least 1".to_string()));
    }
    let n = block_size;
    let v = if n == 1 {
        DMat::zeros(1, 1)
    } else if n == 3 {
        let v1 = DVec::from_column_slice(&[1.0, 1.0, -2.0]);
        let v2 = DVec::from_column_slice(&[2.0, -1.0, -1.0]);
        -(4.0 * &v1 * v1.transpose() + &v2 * v2.transpose())
    } else {
        let mut sum = DMat::zeros(n, n);
        for k in 0..n - 1 {
            let mut vk = DVec::zeros(n);
            vk[k] = 1.0;
            vk[k + 1] = -1.0;
            sum += (k as f64 + 2.0) * &vk * vk.transpose();
        }
        if n >= 3 {
            // A same-sign direction creates a genuinely negative coupling;
            // with block size 2 the kernel constraint forces nonnegative
            // off-diagonals and the system semigroup is plainly positive.
            let mut extra = DVec::zeros(n);
            extra[0] = 1.0;
            extra[1] = 1.0;
            extra[2] = -2.0;
            sum += 4.0 * &extra * extra.transpose();
        }
        -sum
    };
    MatrixPotentialSpec::new(n, move |_| v.clone(), DVec::from_element(n, 1.0))
}

/// Coupled system of 1D diffusions with a matrix potential: the block
/// operator `(Neumann Laplacian) (x) I_N + blockdiag V(x_i)` on the given
/// grid, assembled against the lumped mass. Neumann walls keep the exact
/// eigenpair `(0, c (x) 1)` when the sampled potentials all annihilate `c`.
/// Unknowns are ordered node-major: index `i * N + a` for node `i`,
/// component `a`.
pub fn schrodinger_system(grid: &GridDescriptor, pot: &MatrixPotentialSpec) -> Result<Generator> {
    let n_nodes = grid.n_nodes;
    let nb = pot.block_size();
    let total = n_nodes * nb;
    if total > 5000 {
        return Err(Error::invalid(format!(
            "system size {total} exceeds the supported 5000 unknowns"
        )));
    }
    let scalar = assemble(&FormSpec::new(grid.x_left, grid.x_right, n_nodes - 1)?)?;
    let k_grad = scalar.stiffness();
    let mass = scalar.mass();

    let mut k_sys = DMat::zeros(total, total);
    for i in 0..n_nodes {
        for j in 0..n_nodes {
            let kij = k_grad[(i, j)];
            if kij != 0.0 {
                for a in 0..nb {
                    k_sys[(i * nb + a, j * nb + a)] += kij;
                }
            }
        }
    }
    for i in 0..n_nodes {
        let v = pot
            .validate_at(grid.node(i))
            .map_err(|e| Error::invalid(format!("node {i}: {e}")))?;
        for a in 0..nb {
            for b in 0..nb {
                k_sys[(i * nb + a, i * nb + b)] -= mass[i] * v[(a, b)];
            }
        }
    }
    let mut weights = DVec::zeros(total);
    for i in 0..n_nodes {
        for a in 0..nb {
            weights[i * nb + a] = mass[i];
        }
    }
    let a_sys = DMat::from_fn(total, total, |r, c| -k_sys[(r, c)] / weights[r]);
    Generator::new(
        a_sys,
        weights,
        format!("schrodinger_system(N={nb}, nodes={n_nodes})"),
    )
}

/// Heat generator on (0, length) with natural (Neumann) ends, through the
/// form layer: conservative, positive and irreducible.
pub fn neumann_heat(n_cells: usize, length: f64) -> Result<Generator> {
    let spec = FormSpec::new(0.0, length, n_cells)?
        .with_label(format!("neumann_heat(n={n_cells}, L={length})"));
    let form = assemble(&spec)?;
    Ok(generator_from_form(&form))
}

/// Heat generator on (0, length) with absorbing (Dirichlet) ends: the
/// Neumann assembly with the boundary rows and columns dropped.
pub fn dirichlet_heat(n_cells: usize, length: f64) -> Result<Generator> {
    if n_cells < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 cells, got {n_cells}"
        )));
    }
    let form = assemble(&FormSpec::new(0.0, length, n_cells)?)?;
    let n = form.dim();
    let inner = n - 2;
    let k = DMat::from_fn(inner, inner, |i, j| form.stiffness()[(i + 1, j + 1)]);
    let m = DVec::from_fn(inner, |i, _| form.mass()[i + 1]);
    let a = DMat::from_fn(inner, inner, |i, j| -k[(i, j)] / m[i]);
    Generator::new(a, m, format!("dirichlet_heat(n={n_cells}, L={length})"))
}
