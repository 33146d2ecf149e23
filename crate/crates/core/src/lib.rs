//! Numerical laboratory for finite-dimensional operator semigroups.
//!
//! The crate discretizes generators of one-parameter semigroups
//! `t -> exp(t A)`, exponentiates them, and certifies structural facts about
//! their long-time behaviour: positivity and irreducibility, rank-one
//! equilibrium projections, exponential convergence rates, ellipticity
//! constants of the underlying bilinear forms, and eventual positivity with
//! explicit witness times.
//!
//! Layers, bottom up:
//! - [`linalg`]: dense symmetric eigensolves, matrix exponentials, spectral
//!   norms, pivoted solves;
//! - [`semigroup`]: generators with mass weights, Metzler and irreducibility
//!   predicates, equilibrium projections, convergence profiles, rate fits,
//!   asymptotic classification;
//! - [`forms`]: P1 finite-element assembly of bilinear forms with optional
//!   potential and endpoint coupling, ellipticity constants, positivity
//!   criteria, domain sweeps;
//! - [`scenarios`]: builders for the worked generator models (Schrodinger
//!   wells on a truncated line, nonlocal boundary couplings, systems with
//!   matrix potentials, absorption);
//! - [`eventual`]: eventual-positivity certificates for self-adjoint
//!   semigroups.

pub mod error;
pub mod eventual;
pub mod forms;
pub mod linalg;
pub mod scenarios;
pub mod semigroup;

pub use error::{Error, Result};
pub use linalg::{DMat, DVec};
pub use semigroup::Generator;
