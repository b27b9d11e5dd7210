//! Shared helpers for the unit tests: deterministic chart sampling away
//! from chart degeneracies, and the standard roster of test families.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::geometry::AnalyticFamily;

/// Random chart point with polar angles kept in [0.35, π−0.35] so finite
/// difference stencils never cross a degenerate locus.
pub(crate) fn sample_point(family: &AnalyticFamily, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..family.n())
        .map(|a| {
            if family.dim_is_periodic(a) {
                rng.random::<f64>() * 2.0 * PI
            } else {
                0.35 + rng.random::<f64>() * (PI - 0.7)
            }
        })
        .collect()
}

/// Families exercised by most geometric unit tests: spheres and tori in a
/// range of dimensions, including the equator and a minimal torus.
pub(crate) fn families_under_test() -> Vec<AnalyticFamily> {
    vec![
        AnalyticFamily::round_sphere(2, 1.0).unwrap(),
        AnalyticFamily::round_sphere(2, 0.8).unwrap(),
        AnalyticFamily::round_sphere(3, 0.9).unwrap(),
        AnalyticFamily::round_sphere(4, 0.55).unwrap(),
        AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap(),
        AnalyticFamily::clifford_torus(2, 1, std::f64::consts::FRAC_1_SQRT_2).unwrap(),
        AnalyticFamily::clifford_torus(3, 1, 0.7).unwrap(),
        AnalyticFamily::clifford_torus(4, 2, 0.5).unwrap(),
        AnalyticFamily::clifford_torus(5, 2, 0.64).unwrap(),
    ]
}
