//! Subcommand implementations.
//!
//! Each command builds its `config` echo (the request as understood,
//! with defaults resolved), runs the core computation, and hands a
//! `result`/`residuals` pair to the output layer. Commands return the
//! process exit code so `verify` and `theorem` can report a failed check
//! through code 4 while still emitting the complete document.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use cmc_index::closed_spectrum::{self, SweepPoint};
use cmc_index::fem;
use cmc_index::index_engine::{self, Engine, EngineDetail};
use cmc_index::quad::{QuadratureRule, QuadratureSpec};
use cmc_index::{AnalyticFamily, FamilyKind};

use crate::args::*;
use crate::error::CliError;
use crate::output;
use crate::plot;

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Geometry(a) => geometry(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Index(a) => index(a),
        Command::Verify(a) => verify(a),
        Command::Theorem(a) => theorem(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn build_family(args: &FamilyArgs) -> Result<AnalyticFamily, CliError> {
    let family = match args.family {
        FamilyName::Sphere => {
            if args.k.is_some() {
                return Err(CliError::Usage("--k applies to --family clifford".into()));
            }
            if args.r2.is_some() {
                return Err(CliError::Usage("--r2 applies to --family clifford".into()));
            }
            let r = args
                .r
                .ok_or_else(|| CliError::Usage("--family sphere needs --r".into()))?;
            AnalyticFamily::round_sphere(args.n, r)?
        }
        FamilyName::Clifford => {
            let k = args
                .k
                .ok_or_else(|| CliError::Usage("--family clifford needs --k".into()))?;
            match (args.r, args.r2) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage("give either --r or --r2, not both".into()))
                }
                (Some(r), None) => AnalyticFamily::clifford_torus(args.n, k, r)?,
                (None, Some((p, q))) => AnalyticFamily::clifford_torus_exact_r2(args.n, k, p, q)?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "--family clifford needs --r or --r2".into(),
                    ))
                }
            }
        }
    };
    Ok(family.with_orientation(args.orientation)?)
}

fn family_config(family: &AnalyticFamily, args: &FamilyArgs) -> Value {
    let mut cfg = json!({
        "kind": match family.kind() {
            FamilyKind::RoundSphere => "sphere",
            FamilyKind::CliffordTorus => "clifford",
        },
        "n": family.n(),
        "r": family.r(),
        "orientation": family.orientation(),
    });
    let map = cfg.as_object_mut().unwrap();
    if family.kind() == FamilyKind::CliffordTorus {
        map.insert("k".into(), json!(family.k()));
    }
    if let Some((p, q)) = args.r2 {
        map.insert("r2".into(), json!(format!("{p}/{q}")));
    }
    cfg
}

fn method_name(method: fem::SolveMethod) -> &'static str {
    match method {
        fem::SolveMethod::Auto => "auto",
        fem::SolveMethod::Dense => "dense",
        fem::SolveMethod::ShiftInvert => "shiftInvert",
    }
}

fn build_engine(args: &EngineArgs) -> Result<(Engine, Value), CliError> {
    match args.engine {
        EngineName::Closed => {
            if args.count.is_some() {
                return Err(CliError::Usage("--count applies to --engine fem".into()));
            }
            let cutoff = args.cutoff.unwrap_or(closed_spectrum::CLOSED_CUTOFF);
            let zero_tol = args.zero_tol.unwrap_or(closed_spectrum::CLOSED_ZERO_TOL);
            let cfg = json!({"name": "closed", "cutoff": cutoff, "zeroTol": zero_tol});
            Ok((Engine::Closed { cutoff, zero_tol }, cfg))
        }
        EngineName::Fem => {
            if args.cutoff.is_some() {
                return Err(CliError::Usage("--cutoff applies to --engine closed".into()));
            }
            let (m1, m2) = args.mesh;
            let zero_tol = args.zero_tol.unwrap_or(fem::FEM_ZERO_TOL);
            let method = match args.method {
                MethodName::Auto => fem::SolveMethod::Auto,
                MethodName::Dense => fem::SolveMethod::Dense,
                MethodName::ShiftInvert => fem::SolveMethod::ShiftInvert,
            };
            let cfg = json!({
                "name": "fem",
                "m1": m1,
                "m2": m2,
                "count": args.count,
                "method": method_name(method),
                "zeroTol": zero_tol,
            });
            let engine = Engine::Fem {
                m1,
                m2,
                count: args.count,
                zero_tol,
                method,
            };
            Ok((engine, cfg))
        }
    }
}

fn quad_spec(args: &QuadArgs) -> Result<(QuadratureSpec, Value), CliError> {
    let rule = match args.quad_rule {
        RuleName::Gauss => QuadratureRule::Gauss,
        RuleName::Trapezoid => QuadratureRule::Trapezoid,
    };
    let spec = QuadratureSpec {
        points_per_dim: args.quad_points,
        rule,
    };
    let cfg = json!({
        "pointsPerDim": args.quad_points,
        "rule": match rule {
            QuadratureRule::Gauss => "gauss",
            QuadratureRule::Trapezoid => "trapezoid",
        },
    });
    Ok((spec, cfg))
}

fn engine_residuals(detail: &EngineDetail) -> Value {
    match *detail {
        EngineDetail::Closed {
            modes_enumerated,
            cutoff,
            zero_tol,
        } => json!({
            "engine": "closed",
            "modesEnumerated": modes_enumerated,
            "cutoff": cutoff,
            "zeroTol": zero_tol,
        }),
        EngineDetail::Fem {
            dim,
            eigenpairs,
            max_residual,
            method,
            zero_tol,
        } => json!({
            "engine": "fem",
            "dim": dim,
            "eigenpairs": eigenpairs,
            "maxResidual": max_residual,
            "method": method_name(method),
            "zeroTol": zero_tol,
        }),
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> Result<Value, CliError> {
    serde_json::to_value(value)
        .map_err(|e| CliError::Io(std::io::Error::other(format!("serialize report: {e}"))))
}

fn geometry(args: GeometryArgs) -> Result<i32, CliError> {
    let family = build_family(&args.family)?;
    let inv = family.curvature_invariants();
    let curvatures: Vec<Value> = family
        .principal_curvatures()
        .iter()
        .map(|&(value, multiplicity)| json!({"value": value, "multiplicity": multiplicity}))
        .collect();
    let mut result = json!({
        "family": family.describe(),
        "ambientDim": family.ambient_dim(),
        "area": family.area(),
        "meanCurvature": inv.mean,
        "absMeanCurvature": inv.abs_mean,
        "normA2": inv.norm_a2,
        "normPhi2": inv.norm_phi2,
        "hypothesisGap": inv.hypothesis_gap,
        "stabilityPotential": family.stability_potential(),
        "umbilical": family.is_umbilical(),
        "principalCurvatures": curvatures,
    });
    if family.kind() == FamilyKind::CliffordTorus {
        let map = result.as_object_mut().unwrap();
        map.insert("factorRadiusA".into(), json!(family.a()));
        map.insert("factorRadiusB".into(), json!(family.b()));
    }
    let config = json!({"command": "geometry", "family": family_config(&family, &args.family)});
    let doc = output::document(config, result, json!({}));
    output::emit(args.out.out.as_deref(), &output::render_json(&doc))?;
    Ok(0)
}

fn spectrum(args: SpectrumArgs) -> Result<i32, CliError> {
    let family = build_family(&args.family)?;
    let cutoff = args.cutoff.unwrap_or(closed_spectrum::CLOSED_CUTOFF);
    let zero_tol = args.zero_tol.unwrap_or(closed_spectrum::CLOSED_ZERO_TOL);
    let modes = closed_spectrum::stability_modes(&family, cutoff)?;
    let counts = closed_spectrum::index_count(&modes, zero_tol)?;
    let result = json!({
        "modes": to_value(&modes.modes)?,
        "potential": modes.potential,
        "cutoff": modes.cutoff,
        "counts": to_value(&counts)?,
    });
    let config = json!({
        "command": "spectrum",
        "family": family_config(&family, &args.family),
        "cutoff": cutoff,
        "zeroTol": zero_tol,
    });
    let doc = output::document(config, result, json!({}));
    output::emit(args.out.out.as_deref(), &output::render_json(&doc))?;
    Ok(0)
}

fn index(args: IndexArgs) -> Result<i32, CliError> {
    let family = build_family(&args.family)?;
    let (engine, engine_cfg) = build_engine(&args.engine)?;
    if args.export_matrices.is_some() && !matches!(engine, Engine::Fem { .. }) {
        return Err(CliError::Usage(
            "--export-matrices applies to --engine fem".into(),
        ));
    }
    let computation = index_engine::compute_index(&family, &engine)?;
    if let Some(prefix) = &args.export_matrices {
        if let Engine::Fem { m1, m2, .. } = engine {
            export_matrices(&family, m1, m2, prefix)?;
        }
    }
    let config = json!({
        "command": "index",
        "family": family_config(&family, &args.family),
        "engine": engine_cfg,
    });
    let result = to_value(&computation.counts)?;
    let residuals = engine_residuals(&computation.detail);
    let doc = output::document(config, result, residuals);
    output::emit(args.out.out.as_deref(), &output::render_json(&doc))?;
    Ok(0)
}

fn export_matrices(
    family: &AnalyticFamily,
    m1: usize,
    m2: usize,
    prefix: &Path,
) -> Result<(), CliError> {
    let mesh = fem::build_mesh(m1, m2)?;
    let pencil = fem::assemble(family, &mesh)?;
    let base = prefix.to_string_lossy();
    for (suffix, matrix) in [("k", &pencil.k), ("m", &pencil.m), ("v", &pencil.v)] {
        let path = format!("{base}.{suffix}.txt");
        let mut w = BufWriter::new(File::create(&path)?);
        matrix.write_lower_triples(&mut w)?;
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<i32, CliError> {
    let (spec, quad_cfg) = quad_spec(&args.quad)?;
    let families = index_engine::verify_roster()
        .par_iter()
        .map(|family| index_engine::verify_family(family, &spec))
        .collect::<cmc_index::Result<Vec<_>>>()?;
    let all_passed = families.iter().all(|f| f.passed);
    let report = index_engine::VerifyReport {
        families,
        all_passed,
    };
    let config = json!({"command": "verify", "quadrature": quad_cfg});
    let doc = output::document(config, to_value(&report)?, json!({}));
    output::emit(args.out.out.as_deref(), &output::render_json(&doc))?;
    Ok(if all_passed { 0 } else { 4 })
}

fn theorem(args: TheoremArgs) -> Result<i32, CliError> {
    let family = build_family(&args.family)?;
    let (engine, engine_cfg) = build_engine(&args.engine)?;
    let (spec, quad_cfg) = quad_spec(&args.quad)?;
    let report = index_engine::theorem_check(&family, &spec, &engine)?;
    let consistent = report.consistent;
    let config = json!({
        "command": "theorem",
        "family": family_config(&family, &args.family),
        "engine": engine_cfg,
        "quadrature": quad_cfg,
    });
    let doc = output::document(config, to_value(&report)?, json!({}));
    output::emit(args.out.out.as_deref(), &output::render_json(&doc))?;
    Ok(if consistent { 0 } else { 4 })
}

fn sweep_radii(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    if let Some(radii) = &args.radii {
        if radii.is_empty() {
            return Err(CliError::Usage("--radii needs at least one value".into()));
        }
        return Ok(radii.clone());
    }
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if args.steps == 1 {
        if args.r_min != args.r_max {
            return Err(CliError::Usage(
                "--steps 1 needs --r-min equal to --r-max".into(),
            ));
        }
        return Ok(vec![args.r_min]);
    }
    if args.r_min >= args.r_max {
        return Err(CliError::Usage("--r-min must be below --r-max".into()));
    }
    let h = (args.r_max - args.r_min) / (args.steps - 1) as f64;
    Ok((0..args.steps).map(|i| args.r_min + i as f64 * h).collect())
}

fn sweep(args: SweepArgs) -> Result<i32, CliError> {
    let (engine, engine_cfg) = build_engine(&args.engine)?;
    let radii = sweep_radii(&args)?;
    let points = radii
        .par_iter()
        .map(|&r| {
            let family = AnalyticFamily::clifford_torus(args.n, args.k, r)?;
            let inv = family.curvature_invariants();
            let counts = index_engine::compute_index(&family, &engine)?.counts;
            Ok(SweepPoint {
                r,
                strong: counts.strong,
                weak: counts.weak,
                zero_modes: counts.zero_modes,
                abs_h: inv.abs_mean,
                hypothesis_gap: inv.hypothesis_gap,
            })
        })
        .collect::<cmc_index::Result<Vec<_>>>()?;

    if let Some(path) = &args.plot {
        output::write_atomic(path, &plot::sweep_svg(&points))?;
    }

    let config = json!({
        "command": "sweep",
        "n": args.n,
        "k": args.k,
        "radii": to_value(&radii)?,
        "engine": engine_cfg,
        "format": match args.format {
            FormatName::Json => "json",
            FormatName::Csv => "csv",
        },
    });
    match args.format {
        FormatName::Csv => {
            output::emit(args.out.out.as_deref(), &output::sweep_csv(&points))?;
        }
        FormatName::Json => {
            let doc = output::document(config, json!({"points": to_value(&points)?}), json!({}));
            output::emit(args.out.out.as_deref(), &output::render_json(&doc))?;
        }
    }
    Ok(0)
}
