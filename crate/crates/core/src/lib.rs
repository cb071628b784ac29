//! Delsarte and Turán extremal constants for positive definite invariant
//! kernels.
//!
//! On a finite Gelfand pair `(G, K)` the extremal constant is computed exactly
//! by a linear program over spherical Fourier coefficients; on the sphere
//! `S^d` it is bracketed by a truncation-safe LP upper bound and a
//! cap-autocorrelation lower bound. Convolution roots of positive definite
//! bi-invariant functions (and isotropic kernels) are built by square-rooting
//! the spherical transform.
//!
//! Conventions used throughout: Haar measure on every finite group has total
//! mass 1, the invariant measure on `G/K` has total mass 1, and surface
//! measure on `S^d` is unnormalized (total mass `omega_d`).

pub mod delsarte;
pub mod error;
pub mod gelfand;
pub mod group;
pub mod homspace;
pub mod io;
pub mod lp;
pub mod quadrature;
pub mod rational;
pub mod sample;
pub mod sphere;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupDescriptor, GroupFunction, GroupSubset, Subgroup};
