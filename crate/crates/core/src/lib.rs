//! Constrained plasma equilibrium states on unit-area domains.
//!
//! The crate solves the constrained semilinear problem
//!
//! ```text
//! -Laplace(psi) = (alpha + lambda psi)^p,   int (alpha + lambda psi)^p = 1,
//! psi > 0 in Omega,  psi = 0 on the boundary,  alpha >= 0,
//! ```
//!
//! on the unit square, the unit-area disk and radially symmetric N-balls.
//! On top of the state solvers it provides the constrained spectrum of the
//! non-local linearization, Sobolev best constants, branch continuation in
//! lambda with fold handling, energy observables and a verification suite.

pub mod branch;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod par;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use domain::{Domain, DomainKind, Field, Resolution};
pub use error::{Error, Result};
