//! Command line surface.
//!
//! Every subcommand that evaluates a single family shares [`FamilyArgs`]
//! and, where an index is computed, [`EngineArgs`]. Parsing stops at
//! syntax; cross-field rules (sphere vs torus parameters, engine and
//! family compatibility) are enforced when the family is built so the
//! errors share the normal reporting path.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cmcindex",
    version,
    about = "Morse index toolkit for constant-mean-curvature hypersurfaces of round spheres",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the geometric invariants of a family
    Geometry(GeometryArgs),
    /// Enumerate stability eigenvalues below a spectral cutoff
    Spectrum(SpectrumArgs),
    /// Compute the strong index, weak index and zero modes
    Index(IndexArgs),
    /// Run the identity verification suite over the standard roster
    Verify(VerifyArgs),
    /// Classify a family against the weak-index lower bound
    Theorem(TheoremArgs),
    /// Tabulate the weak index across a range of torus radii
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyName {
    /// Round subsphere S^n(r) of the unit sphere
    Sphere,
    /// Generalized Clifford torus S^k(r) × S^(n-k)(√(1-r²))
    Clifford,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineName {
    /// Exact mode enumeration from the closed-form spectrum
    Closed,
    /// P1 finite elements on a periodic grid (surface tori only)
    Fem,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodName {
    /// Dense below a size limit, iterative above it
    Auto,
    /// Dense generalized symmetric eigensolver
    Dense,
    /// Shift-and-invert block subspace iteration
    ShiftInvert,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleName {
    /// Gauss-Legendre on polar angles, midpoint on periodic angles
    Gauss,
    /// Midpoint rule on every angle
    Trapezoid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatName {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// Family kind
    #[arg(long, value_enum)]
    pub family: FamilyName,

    /// Hypersurface dimension n >= 2
    #[arg(long)]
    pub n: usize,

    /// First factor dimension k, 1 <= k <= n-1 (clifford only)
    #[arg(long)]
    pub k: Option<usize>,

    /// Radius of the sphere, or of the first torus factor
    #[arg(long)]
    pub r: Option<f64>,

    /// Exact squared radius as a fraction, e.g. 1/2 (clifford only)
    #[arg(long, value_name = "P/Q", value_parser = parse_ratio)]
    pub r2: Option<(i64, i64)>,

    /// Unit normal orientation, +1 or -1
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub orientation: i8,
}

#[derive(Args, Debug)]
pub struct EngineArgs {
    /// Index engine
    #[arg(long, value_enum, default_value_t = EngineName::Closed)]
    pub engine: EngineName,

    /// Spectral cutoff for the closed engine
    #[arg(long)]
    pub cutoff: Option<f64>,

    /// Zero-mode tolerance (default 1e-9 closed, 5e-2 fem)
    #[arg(long)]
    pub zero_tol: Option<f64>,

    /// Mesh resolution for the fem engine
    #[arg(long, value_name = "M1xM2", default_value = "48x48", value_parser = parse_mesh)]
    pub mesh: (usize, usize),

    /// Eigenpair block size override for the fem engine
    #[arg(long)]
    pub count: Option<usize>,

    /// Eigensolver selection for the fem engine
    #[arg(long, value_enum, default_value_t = MethodName::Auto)]
    pub method: MethodName,
}

#[derive(Args, Debug)]
pub struct QuadArgs {
    /// Quadrature nodes per chart dimension (default scales with n)
    #[arg(long)]
    pub quad_points: Option<usize>,

    /// Quadrature rule on polar angles
    #[arg(long, value_enum, default_value_t = RuleName::Gauss)]
    pub quad_rule: RuleName,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Write the report to FILE (atomic replace) instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GeometryArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub family: FamilyArgs,

    /// Spectral cutoff; every mode with eigenvalue < cutoff is listed
    #[arg(long)]
    pub cutoff: Option<f64>,

    /// Zero-mode tolerance
    #[arg(long)]
    pub zero_tol: Option<f64>,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub engine: EngineArgs,

    /// Write the assembled fem matrices as PREFIX.k.txt, .m.txt, .v.txt
    #[arg(long, value_name = "PREFIX")]
    pub export_matrices: Option<PathBuf>,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct TheoremArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Hypersurface dimension n >= 2
    #[arg(long)]
    pub n: usize,

    /// First factor dimension k
    #[arg(long)]
    pub k: usize,

    /// Smallest radius of the uniform grid
    #[arg(long, default_value_t = 0.3)]
    pub r_min: f64,

    /// Largest radius of the uniform grid
    #[arg(long, default_value_t = 0.95)]
    pub r_max: f64,

    /// Number of grid points, endpoints included
    #[arg(long, default_value_t = 27)]
    pub steps: usize,

    /// Explicit comma-separated radii; overrides the uniform grid
    #[arg(long, value_delimiter = ',', value_name = "R1,R2,...")]
    pub radii: Option<Vec<f64>>,

    #[command(flatten)]
    pub engine: EngineArgs,

    /// Output format
    #[arg(long, value_enum, default_value_t = FormatName::Json)]
    pub format: FormatName,

    /// Also write an SVG chart of weak index and |H| against r
    #[arg(long, value_name = "FILE")]
    pub plot: Option<PathBuf>,

    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (m1, m2) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected M1xM2, got {s:?}"))?;
    let m1 = m1.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let m2 = m2.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((m1, m2))
}

fn parse_ratio(s: &str) -> Result<(i64, i64), String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("expected P/Q, got {s:?}"))?;
    let p = p.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let q = q.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Ok((p, q))
}
