use thiserror::Error;

/// Errors surfaced by the analysis layers.
///
/// Every refusal carries the diagnostic a caller needs to act on it: the
/// measured asymmetry, the condition estimate, the two competing eigenvalues,
/// and so on.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "matrix is not symmetric: max asymmetry {max_asymmetry:.3e} exceeds tolerance {tol:.3e}"
    )]
    Asymmetric { max_asymmetry: f64, tol: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("negative time t = {t}: semigroups are only evaluated at t >= 0")]
    NegativeTime { t: f64 },

    #[error("linear system is singular (zero pivot at elimination step {step})")]
    SingularSystem { step: usize },

    #[error("linear system too ill-conditioned: estimated condition number {cond:.3e} exceeds {limit:.3e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("eigensolver failed: {detail}")]
    EigenFailure { detail: String },

    #[error(
        "dominant eigenvalue is not simple: {lambda0:.12e} and {nearest:.12e} \
         are separated by {gap:.3e}, below the required {required:.3e}"
    )]
    DominantNotSimple {
        lambda0: f64,
        nearest: f64,
        gap: f64,
        required: f64,
    },

    #[error(
        "irreducibility requires a positive semigroup \
         (generator is not Metzler; worst off-diagonal entry {witness:.3e})"
    )]
    NotMetzler { witness: f64 },

    #[error(
        "profile too short or fully converged: {usable} usable points, need at least {needed}"
    )]
    ProfileTooShort { usable: usize, needed: usize },

    #[error(
        "form not elliptic at this discretization: no omega up to {omega_max} gives alpha > 0"
    )]
    NotElliptic { omega_max: f64 },

    #[error("form is not positive-coercive: alpha at omega = 0 is {alpha0:.3e}")]
    NotCoercive { alpha0: f64 },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
