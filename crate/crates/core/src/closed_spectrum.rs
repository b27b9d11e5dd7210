//! Exact enumeration of the stability spectrum for the built-in families.
//!
//! On a sphere factor S^m of radius ρ the Laplace eigenvalues are
//! j(j+m−1)/ρ² with multiplicity C(m+j, j) − C(m+j−2, j−2) (1 for j = 0,
//! m+1 for j = 1, and 2 for every j ≥ 1 when m = 1). The stability
//! operator J = Δ + |A|² + n shares eigenfunctions with Δ on the
//! homogeneous families, so its spectrum is
//!
//! * sphere S^n(r): μ_j = j(j+n−1)/r² − n/r² = (j−1)(j+n)/r², whose sign
//!   is determined by the integer j alone;
//! * torus S^k(a) × S^{n−k}(b): μ(p,q) = p(p+k−1)/a² + q(q+n−k−1)/b²
//!   − (|A|² + n), with multiplicities multiplying across the factors.
//!
//! Modes are enumerated completely up to a cutoff by monotonicity of the
//! factor eigenvalues. When the family carries an exact rational r², the
//! sign of every μ(p,q) is decided in exact arithmetic, so zero modes at
//! transition radii are classified without floating-point ambiguity.
//!
//! The strong index counts negative modes with multiplicity. Constants
//! are always the lowest eigenfunction (μ = −|A|²−n), and every other
//! eigenfunction is orthogonal to them, so restricting the quadratic form
//! to mean-zero functions removes exactly that one negative direction:
//! the weak index is the strong index minus one.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{AnalyticFamily, FamilyKind};

/// Which eigenfunction family a mode belongs to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ModeLabel {
    /// Degree-j spherical harmonics on S^n(r).
    Sphere { j: u32 },
    /// Product of degree-p and degree-q harmonics on the two factors.
    Product { p: u32, q: u32 },
}

/// One eigenvalue of the stability operator, with multiplicity.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityMode {
    pub label: ModeLabel,
    /// μ = λ_Δ − (|A|² + n), in floating point.
    pub eigenvalue: f64,
    pub multiplicity: u64,
    /// Sign of μ decided in exact arithmetic when available:
    /// −1, 0 or +1.
    pub exact_sign: Option<i8>,
}

/// Complete list of stability modes with μ ≤ cutoff.
#[derive(Clone, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeSpectrum {
    pub modes: Vec<StabilityMode>,
    /// |A|² + n.
    pub potential: f64,
    pub cutoff: f64,
}

/// Index counts extracted from an enumerated spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexCount {
    pub strong: u64,
    pub weak: u64,
    pub zero_modes: u64,
}

/// One entry of a radius sweep.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepPoint {
    pub r: f64,
    pub strong: u64,
    pub weak: u64,
    pub zero_modes: u64,
    pub abs_h: f64,
    pub hypothesis_gap: f64,
}

/// Exact binomial coefficient; the arguments stay far below overflow for
/// every reachable multiplicity.
fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Multiplicity of the degree-j Laplace eigenvalue on S^m.
pub fn harmonic_multiplicity(m: usize, j: u32) -> u64 {
    if j == 0 {
        return 1;
    }
    if m == 1 {
        return 2;
    }
    let (m, j) = (m as u64, j as u64);
    let second = if j >= 2 { binomial(m + j - 2, j - 2) } else { 0 };
    (binomial(m + j, j) - second) as u64
}

/// Laplace eigenvalue and multiplicity of degree j on S^m of radius ρ.
pub fn sphere_eigenvalue(m: usize, radius: f64, j: u32) -> (f64, u64) {
    let jf = j as f64;
    (
        jf * (jf + m as f64 - 1.0) / (radius * radius),
        harmonic_multiplicity(m, j),
    )
}

const ENUM_CAP: u32 = 1_000_000;

fn check_cutoff(cutoff: f64) -> Result<()> {
    if !cutoff.is_finite() || cutoff < 0.0 {
        return Err(Error::Parameter(format!(
            "spectrum cutoff must be finite and nonnegative, got {cutoff}"
        )));
    }
    Ok(())
}

/// Exact stability eigenvalue μ(p,q) as a rational in r².
fn exact_mode_value(n: usize, k: usize, r2: &BigRational, p: u32, q: u32) -> BigRational {
    let big = |v: i64| BigRational::from_integer(v.into());
    let a2 = r2.clone();
    let b2 = BigRational::one() - r2;
    let norm_a2 = big(k as i64) * &b2 / &a2 + big((n - k) as i64) * &a2 / &b2;
    let lam = big((p as i64) * (p as i64 + k as i64 - 1)) / &a2
        + big((q as i64) * (q as i64 + (n - k) as i64 - 1)) / &b2;
    lam - norm_a2 - big(n as i64)
}

/// Enumerate every stability mode with μ ≤ cutoff.
pub fn stability_modes(family: &AnalyticFamily, cutoff: f64) -> Result<ModeSpectrum> {
    check_cutoff(cutoff)?;
    let n = family.n();
    let potential = family.stability_potential();
    let bound = cutoff + potential;
    let mut modes = Vec::new();

    match family.kind() {
        FamilyKind::RoundSphere => {
            let r2 = family.r() * family.r();
            let mut j = 0u32;
            loop {
                let jf = j as f64;
                let lam = jf * (jf + n as f64 - 1.0) / r2;
                if lam > bound {
                    break;
                }
                // (j−1)(j+n)/r² in a cancellation-free form
                let mu = (jf - 1.0) * (jf + n as f64) / r2;
                modes.push(StabilityMode {
                    label: ModeLabel::Sphere { j },
                    eigenvalue: mu,
                    multiplicity: harmonic_multiplicity(n, j),
                    exact_sign: Some(match j {
                        0 => -1,
                        1 => 0,
                        _ => 1,
                    }),
                });
                j += 1;
                if j > ENUM_CAP {
                    return Err(Error::IncompleteEnumeration(format!(
                        "mode enumeration exceeded {ENUM_CAP} harmonics below cutoff {cutoff}"
                    )));
                }
            }
        }
        FamilyKind::CliffordTorus => {
            let k = family.k();
            let (a, b) = (family.a(), family.b());
            let (a2, b2) = (a * a, b * b);
            let exact_r2 = family.r2_exact();
            let mut p = 0u32;
            loop {
                let pf = p as f64;
                let lam_p = pf * (pf + k as f64 - 1.0) / a2;
                if lam_p > bound {
                    break;
                }
                let mut q = 0u32;
                loop {
                    let qf = q as f64;
                    let lam = lam_p + qf * (qf + (n - k) as f64 - 1.0) / b2;
                    if lam > bound {
                        break;
                    }
                    let exact_sign = exact_r2.map(|r2| {
                        let mu = exact_mode_value(n, k, r2, p, q);
                        if mu.is_zero() {
                            0
                        } else if mu.is_negative() {
                            -1
                        } else {
                            1
                        }
                    });
                    modes.push(StabilityMode {
                        label: ModeLabel::Product { p, q },
                        eigenvalue: lam - potential,
                        multiplicity: harmonic_multiplicity(k, p)
                            * harmonic_multiplicity(n - k, q),
                        exact_sign,
                    });
                    q += 1;
                    if q > ENUM_CAP {
                        return Err(Error::IncompleteEnumeration(format!(
                            "mode enumeration exceeded {ENUM_CAP} harmonics below cutoff {cutoff}"
                        )));
                    }
                }
                p += 1;
            }
        }
    }

    modes.sort_by(|x, y| {
        x.eigenvalue
            .partial_cmp(&y.eigenvalue)
            .unwrap()
            .then(x.label.cmp(&y.label))
    });
    Ok(ModeSpectrum {
        modes,
        potential,
        cutoff,
    })
}

/// Count negative and zero modes. The enumeration must see past the zero
/// tolerance for the counts to be complete.
pub fn index_count(spectrum: &ModeSpectrum, zero_tol: f64) -> Result<IndexCount> {
    if !(zero_tol >= 0.0) || !zero_tol.is_finite() {
        return Err(Error::Parameter(format!(
            "zero tolerance must be finite and nonnegative, got {zero_tol}"
        )));
    }
    if spectrum.cutoff <= zero_tol {
        return Err(Error::IncompleteEnumeration(format!(
            "cutoff {} does not clear the zero tolerance {}; modes near zero could be missing",
            spectrum.cutoff, zero_tol
        )));
    }
    let (mut strong, mut zero) = (0u64, 0u64);
    for mode in &spectrum.modes {
        let class = match mode.exact_sign {
            Some(s) => s,
            None => {
                if mode.eigenvalue < -zero_tol {
                    -1
                } else if mode.eigenvalue <= zero_tol {
                    0
                } else {
                    1
                }
            }
        };
        match class {
            -1 => strong += mode.multiplicity,
            0 => zero += mode.multiplicity,
            _ => {}
        }
    }
    // constants are always a negative eigenfunction; every other mode is
    // orthogonal to them, so the mean-zero restriction drops exactly one
    let weak = strong.saturating_sub(1);
    Ok(IndexCount {
        strong,
        weak,
        zero_modes: zero,
    })
}

/// Default zero tolerance for exact-mode counting.
pub const CLOSED_ZERO_TOL: f64 = 1e-9;

/// Default enumeration cutoff.
pub const CLOSED_CUTOFF: f64 = 1.0;

/// Sweep the torus family over a list of radii with the closed engine.
pub fn weak_index_sweep(
    n: usize,
    k: usize,
    radii: &[f64],
    cutoff: f64,
    zero_tol: f64,
) -> Result<Vec<SweepPoint>> {
    radii
        .iter()
        .map(|&r| {
            let family = AnalyticFamily::clifford_torus(n, k, r)?;
            let spectrum = stability_modes(&family, cutoff)?;
            let count = index_count(&spectrum, zero_tol)?;
            let inv = family.curvature_invariants();
            Ok(SweepPoint {
                r,
                strong: count.strong,
                weak: count.weak,
                zero_modes: count.zero_modes,
                abs_h: inv.abs_mean,
                hypothesis_gap: inv.hypothesis_gap,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts(family: &AnalyticFamily) -> IndexCount {
        let spectrum = stability_modes(family, CLOSED_CUTOFF).unwrap();
        index_count(&spectrum, CLOSED_ZERO_TOL).unwrap()
    }

    #[test]
    fn binomial_table() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 10), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn harmonic_multiplicities() {
        // circle: 1, 2, 2, 2, …
        assert_eq!(harmonic_multiplicity(1, 0), 1);
        assert_eq!(harmonic_multiplicity(1, 1), 2);
        assert_eq!(harmonic_multiplicity(1, 7), 2);
        // S²: 2j+1
        for j in 0..8u32 {
            assert_eq!(harmonic_multiplicity(2, j), 2 * j as u64 + 1);
        }
        // S³: (j+1)²
        for j in 0..6u32 {
            assert_eq!(harmonic_multiplicity(3, j), ((j + 1) as u64).pow(2));
        }
        assert_eq!(harmonic_multiplicity(4, 1), 5);
    }

    #[test]
    fn sphere_counts_are_radius_independent() {
        for (n, r) in [(2, 0.3), (2, 0.8), (2, 1.0), (3, 0.9), (5, 0.5)] {
            let family = AnalyticFamily::round_sphere(n, r).unwrap();
            let c = counts(&family);
            assert_eq!(c.strong, 1, "sphere(n={n}, r={r})");
            assert_eq!(c.weak, 0);
            assert_eq!(c.zero_modes, n as u64 + 1);
        }
    }

    #[test]
    fn sphere_signs_are_exact_integers() {
        let family = AnalyticFamily::round_sphere(3, 0.77).unwrap();
        let s = stability_modes(&family, 30.0).unwrap();
        assert!(s.modes.iter().all(|m| m.exact_sign.is_some()));
        let zero: Vec<_> = s.modes.iter().filter(|m| m.exact_sign == Some(0)).collect();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].label, ModeLabel::Sphere { j: 1 });
        assert_eq!(zero[0].multiplicity, 4);
    }

    #[test]
    fn surface_torus_mode_table_at_r06() {
        let family = AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap();
        let s = stability_modes(&family, 1.0).unwrap();
        let get = |p, q| {
            s.modes
                .iter()
                .find(|m| m.label == ModeLabel::Product { p, q })
                .unwrap()
        };
        let pot = 1.0 / (0.36 * 0.64);
        assert!((s.potential - pot).abs() < 1e-12);
        assert!((get(0, 0).eigenvalue + pot).abs() < 1e-12);
        assert!((get(1, 0).eigenvalue + 1.0 / 0.64).abs() < 1e-12);
        assert!((get(0, 1).eigenvalue + 1.0 / 0.36).abs() < 1e-12);
        assert!(get(1, 1).eigenvalue.abs() < 1e-12);
        assert_eq!(get(1, 1).multiplicity, 4);

        let c = counts(&family);
        assert_eq!((c.strong, c.weak, c.zero_modes), (5, 4, 4));
    }

    #[test]
    fn counts_stable_across_generic_band() {
        // between r = 1/2 and r = √3/2 the negatives are exactly
        // {(0,0), (1,0)×2, (0,1)×2}
        for r in [0.52, 0.6, std::f64::consts::FRAC_1_SQRT_2, 0.8, 0.86] {
            let family = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
            let c = counts(&family);
            assert_eq!((c.strong, c.weak, c.zero_modes), (5, 4, 4), "r = {r}");
        }
        // outside the band an extra pair goes negative
        for r in [0.45, 0.9] {
            let family = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
            let c = counts(&family);
            assert_eq!((c.strong, c.weak), (7, 6), "r = {r}");
        }
    }

    #[test]
    fn minimal_tori_hit_the_lower_bound() {
        // strong = n+3, weak = n+2, zeros = (k+1)(n−k+1) at r² = k/n
        for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 2), (5, 2)] {
            let family = AnalyticFamily::minimal_clifford(n, k).unwrap();
            let c = counts(&family);
            assert_eq!(c.strong, n as u64 + 3, "minimal({n},{k})");
            assert_eq!(c.weak, n as u64 + 2);
            assert_eq!(c.zero_modes, ((k + 1) * (n - k + 1)) as u64);
        }
    }

    #[test]
    fn minimal_surface_torus_mode_values() {
        let family = AnalyticFamily::minimal_clifford(2, 1).unwrap();
        let s = stability_modes(&family, 1.0).unwrap();
        let negatives: Vec<(f64, u64)> = s
            .modes
            .iter()
            .filter(|m| m.exact_sign == Some(-1))
            .map(|m| (m.eigenvalue, m.multiplicity))
            .collect();
        assert_eq!(negatives.len(), 3);
        assert!((negatives[0].0 + 4.0).abs() < 1e-12 && negatives[0].1 == 1);
        assert!((negatives[1].0 + 2.0).abs() < 1e-12 && negatives[1].1 == 2);
        assert!((negatives[2].0 + 2.0).abs() < 1e-12 && negatives[2].1 == 2);
    }

    #[test]
    fn unit_mean_curvature_torus_counts() {
        // r² = (2−√2)/4 gives |H| = 1, a²b² = 1/8
        let r = ((2.0 - std::f64::consts::SQRT_2) / 4.0).sqrt();
        let family = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
        assert!((family.curvature_invariants().abs_mean - 1.0).abs() < 1e-12);
        let s = stability_modes(&family, 1.0).unwrap();
        let get = |p, q| {
            s.modes
                .iter()
                .find(|m| m.label == ModeLabel::Product { p, q })
                .unwrap()
                .eigenvalue
        };
        assert!((s.potential - 8.0).abs() < 1e-12, "|A|² + 2 = 8");
        assert!((get(1, 0) + 1.1716).abs() < 1e-4);
        assert!((get(0, 1) + 6.8284).abs() < 1e-4);
        assert!((get(0, 2) + 3.3137).abs() < 1e-4);
        let c = counts(&family);
        assert_eq!((c.strong, c.weak, c.zero_modes), (7, 6, 4));
    }

    #[test]
    fn transition_radii_classified_exactly() {
        // at r² = 1/4 the (0,2) mode is exactly zero; at 3/4 it is (2,0)
        for (p, q) in [(1i64, 4i64), (3, 4)] {
            let family = AnalyticFamily::clifford_torus_exact_r2(2, 1, p, q).unwrap();
            let s = stability_modes(&family, 1.0).unwrap();
            assert!(s.modes.iter().all(|m| m.exact_sign.is_some()));
            let c = index_count(&s, CLOSED_ZERO_TOL).unwrap();
            assert_eq!(c.zero_modes, 6, "r² = {p}/{q}");
            assert_eq!((c.strong, c.weak), (5, 4));
        }
        let family = AnalyticFamily::clifford_torus_exact_r2(2, 1, 1, 4).unwrap();
        let s = stability_modes(&family, 1.0).unwrap();
        let zero = s
            .modes
            .iter()
            .find(|m| m.label == ModeLabel::Product { p: 0, q: 2 })
            .unwrap();
        assert_eq!(zero.exact_sign, Some(0));
    }

    #[test]
    fn enumeration_is_monotone_in_the_cutoff() {
        let family = AnalyticFamily::clifford_torus(3, 1, 0.62).unwrap();
        let small = stability_modes(&family, 4.0).unwrap();
        let large = stability_modes(&family, 25.0).unwrap();
        assert!(small.modes.len() < large.modes.len());
        let kept: Vec<_> = large
            .modes
            .iter()
            .filter(|m| m.eigenvalue <= 4.0)
            .map(|m| m.label)
            .collect();
        let got: Vec<_> = small.modes.iter().map(|m| m.label).collect();
        assert_eq!(kept, got, "small enumeration is a prefix of the large one");
    }

    #[test]
    fn shallow_cutoff_is_rejected_for_counting() {
        let family = AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap();
        let s = stability_modes(&family, 0.5).unwrap();
        assert!(index_count(&s, 0.5).is_err());
        assert!(index_count(&s, 0.4).is_ok());
        assert!(stability_modes(&family, -1.0).is_err());
        assert!(index_count(&s, f64::NAN).is_err());
    }

    #[test]
    fn sweep_reports_geometry_alongside_counts() {
        let points = weak_index_sweep(2, 1, &[0.45, 0.6, 0.9], 1.0, CLOSED_ZERO_TOL).unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(points[0].weak, 6);
        assert_eq!(points[1].weak, 4);
        assert_eq!(points[2].weak, 6);
        assert!((points[1].abs_h - 7.0 / 24.0).abs() < 1e-12);
        for p in &points {
            assert!((p.hypothesis_gap - 2.0).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn rational_and_float_classification_agree(q in 5i64..60, offset in 1i64..59) {
            let p = offset.min(q - 1);
            let exact = AnalyticFamily::clifford_torus_exact_r2(2, 1, p, q).unwrap();
            let float = AnalyticFamily::clifford_torus(2, 1, exact.r()).unwrap();
            let se = stability_modes(&exact, 1.0).unwrap();
            let sf = stability_modes(&float, 1.0).unwrap();
            let ce = index_count(&se, CLOSED_ZERO_TOL).unwrap();
            let cf = index_count(&sf, CLOSED_ZERO_TOL).unwrap();
            prop_assert_eq!(ce, cf);
        }

        #[test]
        fn torus_zero_modes_never_fall_below_the_rotations(r in 0.05f64..0.95) {
            // (1,1) is always an exact zero mode of multiplicity ≥ 4
            let family = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
            let c = counts(&family);
            prop_assert!(c.zero_modes >= 4);
            prop_assert!(c.strong >= 5);
        }
    }
}
