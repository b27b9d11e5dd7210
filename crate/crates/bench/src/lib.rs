//! Benchmark-only crate; see `benches/pipeline.rs`.
//!
//! Shared fixtures for the benchmarks live here so the bench target
//! stays a flat list of measurements.

use cmc_index::AnalyticFamily;

/// The torus most of the benchmarks exercise.
pub fn generic_torus() -> AnalyticFamily {
    AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap()
}

/// A higher-dimensional family for enumeration benchmarks.
pub fn tall_minimal_torus() -> AnalyticFamily {
    AnalyticFamily::minimal_clifford(8, 3).unwrap()
}
