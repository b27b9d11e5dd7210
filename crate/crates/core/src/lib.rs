//! Stability index computations for constant-mean-curvature hypersurfaces
//! of the round sphere.
//!
//! The crate computes the strong and weak Morse index of the second
//! variation of area for the built-in analytic families, the round
//! subspheres S^n(r) and the generalized Clifford tori
//! S^k(a) × S^{n−k}(b) inside S^{n+1}. Two independent engines are
//! provided:
//!
//! * [`closed_spectrum`]: exact enumeration of the stability spectrum
//!   from the known Laplace eigenvalues of product spheres, with optional
//!   exact rational classification of eigenvalue signs;
//! * [`fem`]: a P1 finite element discretization of the stability pencil
//!   on surface tori, solved by dense or shift-and-invert block subspace
//!   iteration.
//!
//! Around the two engines sit geometric support-function machinery
//! ([`support`]), quadrature over product hyperspherical charts
//! ([`quad`]) and the reporting layer ([`index_engine`]) that classifies
//! each family against the index lower bound and the associated integral
//! identities.

pub mod error;

mod chart;

pub mod closed_spectrum;
pub mod fem;
pub mod geometry;
pub mod index_engine;
pub mod quad;
pub mod support;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use geometry::{AmbientVector, AnalyticFamily, CurvatureInvariants, FamilyKind, GeometryFrame};

/// Library version, surfaced in machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
