//! Finite element engine for the stability pencil on surface tori.
//!
//! The chain runs mesh → assembly → eigensolve: a structured periodic
//! triangulation of the chart ([`mesh`]), exact P1 assembly of the
//! stiffness/mass/potential matrices ([`assemble`], [`sparse`]), and a
//! deterministic generalized eigensolver with dense and
//! shift-and-invert paths ([`solve`]). Index counts extracted here are
//! the discretized counterpart of the exact mode enumeration and agree
//! with it on every family both engines cover.

pub mod assemble;
pub mod mesh;
pub mod solve;
pub mod sparse;

pub use assemble::{assemble, assemble_flat, StabilityPencil};
pub use mesh::{build_mesh, TorusMesh};
pub use solve::{
    eigen_solve, fem_index_counts, negative_count, weak_negative_count, PencilSpectrum,
    SolveMethod, FEM_ZERO_TOL,
};
pub use sparse::CsrMatrix;
