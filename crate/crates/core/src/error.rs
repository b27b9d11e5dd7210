//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. The variants map onto the
//! process exit codes used by the command-line frontend: parameter and
//! enumeration problems are caller errors, `Convergence` is a numerical
//! failure, and `InvariantViolation` means an internal consistency check
//! tripped and the output cannot be trusted.

/// Errors produced by geometry, quadrature, spectral and index routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid input: dimensions, radii, mesh sizes, tolerances.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Chart evaluation at a point where the pullback metric degenerates.
    #[error("degenerate chart point: {0}")]
    DegenerateChart(String),

    /// The requested operation is not defined for this family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// An iterative solver failed to reach its residual target.
    #[error("eigensolver did not converge: best residual {best_residual:.3e} after {iterations} iterations")]
    Convergence {
        best_residual: f64,
        iterations: usize,
    },

    /// A spectrum was requested or supplied that provably misses modes
    /// needed for the answer (cutoff too small, eigenpair count too small).
    #[error("incomplete spectrum enumeration: {0}")]
    IncompleteEnumeration(String),

    /// An internal invariant failed; results must not be reported.
    #[error("internal invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
