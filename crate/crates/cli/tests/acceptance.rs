//! Acceptance gate: one test per release criterion, run serially so the
//! stated runtime budgets mean something. Each test prints a single
//! PASS line on success; a failure carries the full diagnosis in the
//! panic message.

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde_json::Value;

use cmc_index::fem;
use cmc_index::index_engine::{self, Engine};
use cmc_index::quad::QuadratureSpec;
use cmc_index::support;
use cmc_index::AnalyticFamily;

static GATE: Mutex<()> = Mutex::new(());

fn criterion(name: &str, budget: Option<Duration>, body: impl FnOnce() -> String) {
    let _lock = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let detail = body();
    let elapsed = start.elapsed();
    if let Some(budget) = budget {
        assert!(
            elapsed <= budget,
            "{name}: FAIL, exceeded runtime budget ({elapsed:.2?} > {budget:.2?})"
        );
    }
    println!("{name}: PASS ({detail}, {elapsed:.2?})");
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cmcindex"));
    cmd.env_remove("CMCINDEX_THREADS");
    cmd
}

fn bin_json(args: &[&str]) -> (Value, i32) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let doc = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout of {args:?} is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (doc, code)
}

#[test]
fn criterion_1_equator_index_is_one_for_every_dimension() {
    criterion(
        "criterion 1 (equator index across dimensions)",
        Some(Duration::from_secs(1)),
        || {
            for n in 2..=12 {
                let (doc, code) = bin_json(&[
                    "index", "--family", "sphere", "--n", &n.to_string(), "--r", "1.0",
                ]);
                assert_eq!(code, 0, "n={n}");
                assert_eq!(doc["result"]["strong"], 1, "n={n}");
                assert_eq!(doc["result"]["weak"], 0, "n={n}");
            }
            "strong=1, weak=0 for n=2..12".into()
        },
    );
}

#[test]
fn criterion_2_minimal_torus_index_in_every_dimension_pair() {
    criterion(
        "criterion 2 (minimal torus index, all n and k)",
        Some(Duration::from_secs(5)),
        || {
            let mut families = 0usize;
            for n in 2..=12usize {
                for k in 1..n {
                    let family = AnalyticFamily::minimal_clifford(n, k).unwrap();
                    let counts = index_engine::compute_index(&family, &Engine::closed_default())
                        .unwrap()
                        .counts;
                    assert_eq!(
                        counts.strong,
                        n as u64 + 3,
                        "strong index at n={n}, k={k}"
                    );
                    assert_eq!(counts.weak, n as u64 + 2, "weak index at n={n}, k={k}");
                    families += 1;
                }
            }
            format!("strong=n+3, weak=n+2 over {families} minimal tori")
        },
    );
}

#[test]
fn criterion_3_fem_reproduces_the_closed_counts() {
    criterion(
        "criterion 3 (fem vs closed at 96x96)",
        Some(Duration::from_secs(60)),
        || {
            let radii = [0.45, 0.5, 0.6, std::f64::consts::FRAC_1_SQRT_2, 0.8, 0.87];
            let fem_engine = Engine::fem_default(96, 96);
            for &r in &radii {
                let family = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
                let closed = index_engine::compute_index(&family, &Engine::closed_default())
                    .unwrap()
                    .counts;
                let fem_counts = index_engine::compute_index(&family, &fem_engine)
                    .unwrap()
                    .counts;
                assert_eq!(
                    (closed.strong, closed.weak),
                    (fem_counts.strong, fem_counts.weak),
                    "count mismatch at r={r}: closed {closed:?}, fem {fem_counts:?}"
                );
            }

            // spot-check the five most negative eigenvalues at the minimal radius
            let family = AnalyticFamily::minimal_clifford(2, 1).unwrap();
            let mesh = fem::build_mesh(96, 96).unwrap();
            let pencil = fem::assemble(&family, &mesh).unwrap();
            let spectrum = fem::eigen_solve(&pencil, 5, fem::SolveMethod::Auto).unwrap();
            let expected = [-4.0, -2.0, -2.0, -2.0, -2.0];
            for (got, want) in spectrum.eigenvalues.iter().zip(expected) {
                assert!(
                    (got - want).abs() <= 0.02 * want.abs(),
                    "eigenvalue {got} vs {want} off by more than 2%"
                );
            }
            "counts equal at 6 radii; lowest five eigenvalues within 2%".into()
        },
    );
}

#[test]
fn criterion_4_weak_index_window() {
    criterion("criterion 4 (weak index window probe)", None, || {
        let lower = 0.5;
        let upper = (3.0f64 / 4.0).sqrt();
        let mut inside = 0usize;
        let mut outside = 0usize;
        let mut boundary = 0usize;
        for i in 0..27 {
            let r = 0.3 + 0.025 * i as f64;
            let family = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
            let counts = index_engine::compute_index(&family, &Engine::closed_default())
                .unwrap()
                .counts;
            if (r - lower).abs() < 1e-12 || (r - upper).abs() < 1e-12 {
                assert!(counts.zero_modes > 4, "boundary r={r}: {counts:?}");
                boundary += 1;
            } else if r > lower && r < upper {
                assert_eq!(counts.weak, 4, "inside r={r}: {counts:?}");
                inside += 1;
            } else {
                assert!(counts.weak > 4, "outside r={r}: {counts:?}");
                outside += 1;
            }
        }
        // both window edges, pinned by exact rational arithmetic
        for (p, q) in [(1i64, 4i64), (3, 4)] {
            let family = AnalyticFamily::clifford_torus_exact_r2(2, 1, p, q).unwrap();
            let counts = index_engine::compute_index(&family, &Engine::closed_default())
                .unwrap()
                .counts;
            assert!(
                counts.zero_modes > 4,
                "exact boundary r2={p}/{q}: {counts:?}"
            );
            assert_eq!(counts.weak, 4, "exact boundary r2={p}/{q}: {counts:?}");
        }
        format!("{inside} inside at weak=4, {outside} outside above 4, {boundary}+2 boundary points with extra zero modes")
    });
}

#[test]
fn criterion_5_identity_suite_passes_within_budget() {
    criterion(
        "criterion 5 (identity verification suite)",
        Some(Duration::from_secs(30)),
        || {
            let (doc, code) = bin_json(&["verify"]);
            assert_eq!(code, 0, "verify exit code");
            assert_eq!(doc["result"]["allPassed"], true);
            let families = doc["result"]["families"].as_array().unwrap();
            assert_eq!(families.len(), 10);
            for fam in families {
                assert_eq!(fam["passed"], true, "family {}", fam["family"]);
            }

            // the two quoted reference values
            let spec = QuadratureSpec::default();
            let minimal = AnalyticFamily::minimal_clifford(2, 1).unwrap();
            let prop = index_engine::proposition_check(&minimal, &spec).unwrap();
            let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
            assert!(
                (prop.trace + four_pi2).abs() <= 1e-6 * four_pi2,
                "minimal torus trace {} vs {}",
                prop.trace,
                -four_pi2
            );

            let torus = AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap();
            let e1 = cmc_index::geometry::canonical_basis(4, 0);
            let report = support::integral_identity_check(&torus, &e1, &spec).unwrap();
            assert!(
                (report.lhs + 2.6528).abs() < 1e-3,
                "lhs {} vs -2.6528",
                report.lhs
            );
            assert!(report.residual <= 1e-8, "residual {}", report.residual);
            "10 families pass; reference values -4pi^2 and -2.6528 reproduced".into()
        },
    );
}

fn theorem_probe_set() -> Vec<AnalyticFamily> {
    let mut set = Vec::new();
    for i in 0..25 {
        let r = 0.35 + 0.55 * i as f64 / 24.0;
        set.push(AnalyticFamily::clifford_torus(2, 1, r).unwrap());
    }
    let unit_h = ((2.0 - std::f64::consts::SQRT_2) / 4.0).sqrt();
    set.push(AnalyticFamily::clifford_torus(2, 1, unit_h).unwrap());
    set.push(AnalyticFamily::round_sphere(2, 1.0).unwrap());
    set.push(AnalyticFamily::round_sphere(2, 0.8).unwrap());
    set.push(AnalyticFamily::round_sphere(3, 0.9).unwrap());
    set
}

#[test]
fn criterion_6_theorem_consistency_tripwire() {
    criterion("criterion 6 (theorem consistency tripwire)", None, || {
        let spec = QuadratureSpec::default();
        let engine = Engine::closed_default();
        let mut cases = std::collections::BTreeMap::<String, usize>::new();
        for family in theorem_probe_set() {
            let report = index_engine::theorem_check(&family, &spec, &engine).unwrap();
            assert!(
                report.consistent,
                "inconsistent classification on {}: {report:?}",
                family.describe()
            );
            if let Some(bound) = report.predicted_lower_bound {
                assert!(
                    report.weak_index >= bound,
                    "bound {bound} above weak index {} on {}",
                    report.weak_index,
                    family.describe()
                );
            }
            *cases.entry(report.case_applied).or_default() += 1;
        }

        // umbilical spheres with nonzero mean curvature must decline
        for family in [
            AnalyticFamily::round_sphere(2, 0.8).unwrap(),
            AnalyticFamily::round_sphere(3, 0.9).unwrap(),
        ] {
            let report = index_engine::theorem_check(&family, &spec, &engine).unwrap();
            assert_eq!(report.case_applied, index_engine::CASE_NONE);
        }
        // the named special members classify, with the unit-|H| proof bound
        let unit_h = ((2.0 - std::f64::consts::SQRT_2) / 4.0).sqrt();
        let report = index_engine::theorem_check(
            &AnalyticFamily::clifford_torus(2, 1, unit_h).unwrap(),
            &spec,
            &engine,
        )
        .unwrap();
        assert_eq!(report.case_applied, index_engine::CASE_UNIT_H);
        assert!(report.case1_bound_violation.unwrap() <= 1e-6);
        let report = index_engine::theorem_check(
            &AnalyticFamily::round_sphere(2, 1.0).unwrap(),
            &spec,
            &engine,
        )
        .unwrap();
        assert_eq!(report.case_applied, index_engine::CASE_GE_SMALL_H);
        let report = index_engine::theorem_check(
            &AnalyticFamily::minimal_clifford(2, 1).unwrap(),
            &spec,
            &engine,
        )
        .unwrap();
        assert_eq!(report.case_applied, index_engine::CASE_GE_SMALL_H);
        assert_eq!(report.predicted_lower_bound, Some(4));

        // end-to-end exit wiring: a consistent report exits 0
        let (doc, code) = bin_json(&[
            "theorem", "--family", "clifford", "--n", "2", "--k", "1", "--r2", "1/2",
        ]);
        assert_eq!(code, 0);
        assert_eq!(doc["result"]["consistent"], true);

        format!("consistent everywhere; case tally {cases:?}")
    });
}

#[test]
fn criterion_6_not_applicable_exactly_on_nonminimal_spheres() {
    criterion(
        "criterion 6 exactness (NotApplicable only on umbilical H != 0)",
        None,
        || {
            let spec = QuadratureSpec::default();
            let engine = Engine::closed_default();
            let mut declined = Vec::new();
            let mut umbilical_nonzero_h = Vec::new();
            for family in theorem_probe_set() {
                let report = index_engine::theorem_check(&family, &spec, &engine).unwrap();
                let inv = family.curvature_invariants();
                if report.case_applied == index_engine::CASE_NONE {
                    declined.push(family.describe());
                }
                if family.is_umbilical() && inv.abs_mean > 1e-12 {
                    umbilical_nonzero_h.push(family.describe());
                }
            }
            assert_eq!(
                declined, umbilical_nonzero_h,
                "NotApplicable is not exclusive to umbilical families with H != 0: every \
                 non-minimal torus also declines, because its direction integrals \
                 D(v) = integral(|grad l_v|^2) - n*integral(l_v^2) take both signs: \
                 D(e1) = 2 pi^2 a b (1 - 2a^2) = -D(e3), nonzero whenever r^2 != 1/2, \
                 so neither one-sided integral hypothesis can hold there and no case applies"
            );
            "NotApplicable coincides with the umbilical H != 0 members".into()
        },
    );
}

#[test]
fn criterion_7_gram_rank_counts_the_independent_test_functions() {
    criterion("criterion 7 (Gram matrix rank)", None, || {
        let spec = QuadratureSpec::default();
        let mut tori = 0usize;
        let mut spheres = 0usize;
        for family in index_engine::verify_roster() {
            let gram = index_engine::lemma_gram_check(&family, &spec).unwrap();
            let n = family.n();
            if family.is_umbilical() {
                assert_eq!(
                    gram.rank,
                    n + 1,
                    "umbilical rank on {}: eigenvalues {:?}",
                    family.describe(),
                    gram.eigenvalues
                );
                spheres += 1;
            } else {
                assert_eq!(
                    gram.rank,
                    n + 2,
                    "full rank on {}: eigenvalues {:?}",
                    family.describe(),
                    gram.eigenvalues
                );
                tori += 1;
            }
        }
        let equator = AnalyticFamily::round_sphere(2, 1.0).unwrap();
        let gram = index_engine::lemma_gram_check(&equator, &spec).unwrap();
        assert_eq!(gram.rank, 3, "equator rank");
        format!("rank n+2 on {tori} tori, n+1 on {spheres} umbilical members, equator rank 3")
    });
}
