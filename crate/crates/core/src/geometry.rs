//! Analytic families of CMC hypersurfaces of the unit round sphere.
//!
//! Two families are built in, both embedded in S^{n+1} ⊂ R^{n+2}:
//!
//! * `RoundSphere`: the totally umbilical sphere S^n(r), realized as
//!   x = (r·ω, c) with ω ∈ S^n and c = √(1−r²). At r = 1 this is the
//!   totally geodesic equator.
//! * `CliffordTorus`: the generalized Clifford torus S^k(a) × S^{n−k}(b)
//!   with a = r, b = √(1−r²), realized as x = (a·ω₁, b·ω₂).
//!
//! Charts are products of hyperspherical charts (see [`crate::chart`]);
//! the pullback metric is diagonal in these coordinates and the shape
//! operator is constant and diagonal as well:
//!
//! * sphere: A = −sign·(c/r)·Id, so H = −sign·c/r;
//! * torus: principal curvatures sign·b/a (multiplicity k) and
//!   −sign·a/b (multiplicity n−k), so n·H = sign·(k·b/a − (n−k)·a/b).
//!
//! `sign` is the stored orientation of the unit normal, +1 for
//! N = (−b·ω₁, a·ω₂) on the torus and N = (c·ω, −r) on the sphere. All
//! index counts, |H|, |A|² and the traceless norm |φ|² = |A|² − n·H² are
//! orientation independent; only the signs of H and of the normal support
//! function flip.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chart;
use crate::error::{Error, Result};

/// A vector of R^{n+2}, the ambient Euclidean space of S^{n+1}.
pub type AmbientVector = DVector<f64>;

/// Canonical basis vector e_i of R^{dim}.
pub fn canonical_basis(dim: usize, i: usize) -> AmbientVector {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// Chart metric determinant below which a point counts as degenerate.
pub const DEGENERATE_DET: f64 = 1e-12;

/// Traceless-norm threshold below which a family counts as umbilical.
pub const UMBILICAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FamilyKind {
    RoundSphere,
    CliffordTorus,
}

/// A built-in analytic family, fixed dimension and radius parameter.
#[derive(Clone, Debug)]
pub struct AnalyticFamily {
    kind: FamilyKind,
    n: usize,
    k: usize,
    r: f64,
    /// Exact value of r² when the family was constructed from a rational.
    r2_exact: Option<BigRational>,
    orientation: i8,
}

/// Scalar curvature data, constant over a homogeneous family.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvatureInvariants {
    /// Mean curvature H with the stored orientation.
    pub mean: f64,
    pub abs_mean: f64,
    /// |A|², squared norm of the second fundamental form.
    pub norm_a2: f64,
    /// |φ|² = |A|² − n·H², squared norm of the traceless part.
    pub norm_phi2: f64,
    /// |A|² − 2n·H², the quantity whose sign gates the index bound.
    pub hypothesis_gap: f64,
}

/// Pointwise chart data: everything the integrators need, kept lean.
pub(crate) struct ChartEval {
    /// Position x ∈ S^{n+1} ⊂ R^{n+2}.
    pub x: DVector<f64>,
    /// Unit normal within S^{n+1}.
    pub normal: DVector<f64>,
    /// (n+2) × n matrix of chart tangent vectors ∂x/∂u_a.
    pub jac: DMatrix<f64>,
    /// Diagonal of the pullback metric.
    pub g_diag: Vec<f64>,
    /// Diagonal of the shape operator in the chart basis.
    pub kappa: Vec<f64>,
    /// √det g, the area element.
    pub sqrt_det_g: f64,
}

/// Frame of first- and second-fundamental-form data at a chart point.
#[derive(Clone, Debug)]
pub struct GeometryFrame {
    pub position: AmbientVector,
    pub normal: AmbientVector,
    /// Pullback metric in the chart basis, n×n.
    pub metric: DMatrix<f64>,
    /// Shape operator in the chart basis, n×n; metric·shape is symmetric.
    pub shape: DMatrix<f64>,
    pub mean_curvature: f64,
    pub norm_a2: f64,
    pub norm_phi2: f64,
}

impl AnalyticFamily {
    /// S^n(r) ⊂ S^{n+1}, r ∈ (0, 1]. r = 1 is the equator.
    pub fn round_sphere(n: usize, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n must be >= 2, got {n}")));
        }
        if !(r > 0.0 && r <= 1.0) || !r.is_finite() {
            return Err(Error::Parameter(format!(
                "sphere radius must lie in (0, 1], got {r}"
            )));
        }
        Ok(Self {
            kind: FamilyKind::RoundSphere,
            n,
            k: 0,
            r,
            r2_exact: None,
            orientation: 1,
        })
    }

    /// S^k(r) × S^{n−k}(√(1−r²)) ⊂ S^{n+1}, r ∈ (0, 1), 1 ≤ k ≤ n−1.
    pub fn clifford_torus(n: usize, k: usize, r: f64) -> Result<Self> {
        Self::validate_torus_dims(n, k)?;
        if !(r > 0.0 && r < 1.0) || !r.is_finite() {
            return Err(Error::Parameter(format!(
                "torus radius must lie in (0, 1), got {r}"
            )));
        }
        Ok(Self {
            kind: FamilyKind::CliffordTorus,
            n,
            k,
            r,
            r2_exact: None,
            orientation: 1,
        })
    }

    /// Clifford torus with r² = p/q given exactly; enables exact
    /// classification of zero modes in the closed spectrum.
    pub fn clifford_torus_exact_r2(n: usize, k: usize, p: i64, q: i64) -> Result<Self> {
        Self::validate_torus_dims(n, k)?;
        if q == 0 {
            return Err(Error::Parameter("rational r² has zero denominator".into()));
        }
        let r2 = BigRational::new(p.into(), q.into());
        if !(r2 > BigRational::zero() && r2 < BigRational::one()) {
            return Err(Error::Parameter(format!(
                "rational r² must lie in (0, 1), got {p}/{q}"
            )));
        }
        let r = rational_to_f64(&r2).sqrt();
        Ok(Self {
            kind: FamilyKind::CliffordTorus,
            n,
            k,
            r,
            r2_exact: Some(r2),
            orientation: 1,
        })
    }

    /// The minimal Clifford torus, r² = k/n.
    pub fn minimal_clifford(n: usize, k: usize) -> Result<Self> {
        Self::clifford_torus_exact_r2(n, k, k as i64, n as i64)
    }

    /// Same family with the unit normal flipped.
    pub fn with_orientation(mut self, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Parameter(format!(
                "orientation must be +1 or -1, got {sign}"
            )));
        }
        self.orientation = sign;
        Ok(self)
    }

    fn validate_torus_dims(n: usize, k: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n must be >= 2, got {n}")));
        }
        if k == 0 || k >= n {
            return Err(Error::Parameter(format!(
                "torus factor dimension k must satisfy 1 <= k <= n-1, got k={k}, n={n}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Hypersurface dimension n; the chart has n coordinates and the
    /// ambient space has n+2.
    pub fn n(&self) -> usize {
        self.n
    }

    /// First factor dimension of the torus; 0 for spheres.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Exact r² when constructed through [`Self::clifford_torus_exact_r2`].
    pub fn r2_exact(&self) -> Option<&BigRational> {
        self.r2_exact.as_ref()
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 2
    }

    /// First factor radius a = r (torus) or the sphere radius.
    pub fn a(&self) -> f64 {
        self.r
    }

    /// Second factor radius b = √(1−r²); for spheres this is the height
    /// c of the slice.
    pub fn b(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }

    /// Distinct principal curvatures with multiplicities, for the stored
    /// orientation.
    pub fn principal_curvatures(&self) -> Vec<(f64, usize)> {
        let s = self.orientation as f64;
        match self.kind {
            FamilyKind::RoundSphere => vec![(-s * self.b() / self.r, self.n)],
            FamilyKind::CliffordTorus => {
                let (a, b) = (self.a(), self.b());
                vec![(s * b / a, self.k), (-s * a / b, self.n - self.k)]
            }
        }
    }

    pub fn curvature_invariants(&self) -> CurvatureInvariants {
        let n = self.n as f64;
        let (mut trace, mut norm_a2) = (0.0, 0.0);
        for (kappa, mult) in self.principal_curvatures() {
            trace += kappa * mult as f64;
            norm_a2 += kappa * kappa * mult as f64;
        }
        let mean = trace / n;
        let norm_phi2 = norm_a2 - n * mean * mean;
        CurvatureInvariants {
            mean,
            abs_mean: mean.abs(),
            norm_a2,
            norm_phi2,
            hypothesis_gap: norm_a2 - 2.0 * n * mean * mean,
        }
    }

    /// Whether the family is totally umbilical (|φ|² below tolerance).
    pub fn is_umbilical(&self) -> bool {
        self.curvature_invariants().norm_phi2 <= UMBILICAL_TOL
    }

    /// n-dimensional volume, in closed form.
    pub fn area(&self) -> f64 {
        match self.kind {
            FamilyKind::RoundSphere => unit_sphere_volume(self.n) * self.r.powi(self.n as i32),
            FamilyKind::CliffordTorus => {
                let (a, b) = (self.a(), self.b());
                unit_sphere_volume(self.k)
                    * a.powi(self.k as i32)
                    * unit_sphere_volume(self.n - self.k)
                    * b.powi((self.n - self.k) as i32)
            }
        }
    }

    /// The constant |A|² + n appearing in the stability operator.
    pub fn stability_potential(&self) -> f64 {
        self.curvature_invariants().norm_a2 + self.n as f64
    }

    /// Number of chart coordinates per factor: spheres have one factor of
    /// dimension n, tori have factors of dimension k and n−k.
    pub fn factor_dims(&self) -> Vec<usize> {
        match self.kind {
            FamilyKind::RoundSphere => vec![self.n],
            FamilyKind::CliffordTorus => vec![self.k, self.n - self.k],
        }
    }

    /// Whether chart coordinate `a` is periodic (period 2π) rather than a
    /// polar angle with domain (0, π).
    pub fn dim_is_periodic(&self, a: usize) -> bool {
        let mut offset = 0;
        for m in self.factor_dims() {
            if a < offset + m {
                return chart::sphere_dim_is_periodic(m, a - offset);
            }
            offset += m;
        }
        panic!("chart coordinate index {a} out of range");
    }

    /// Short human-readable descriptor for reports and errors.
    pub fn describe(&self) -> String {
        match self.kind {
            FamilyKind::RoundSphere => format!("sphere(n={}, r={})", self.n, self.r),
            FamilyKind::CliffordTorus => {
                format!("clifford(n={}, k={}, r={})", self.n, self.k, self.r)
            }
        }
    }

    fn check_point_dim(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::Parameter(format!(
                "chart point has {} coordinates, family {} needs {}",
                u.len(),
                self.describe(),
                self.n
            )));
        }
        Ok(())
    }

    /// Evaluate position, normal, tangent basis, metric and shape diagonal
    /// at a chart point, rejecting points where the chart degenerates.
    pub(crate) fn chart_eval(&self, u: &[f64]) -> Result<ChartEval> {
        let e = self.chart_eval_raw(u)?;
        let det: f64 = e.g_diag.iter().product();
        if !(det > DEGENERATE_DET) {
            return Err(Error::DegenerateChart(format!(
                "metric determinant {det:.3e} at u={u:?} on {}",
                self.describe()
            )));
        }
        Ok(e)
    }

    /// Same evaluation without the degeneracy guard. Every formula here is
    /// finite on the open chart, so strictly interior quadrature nodes may
    /// sit arbitrarily close to the axis; the area element weights them
    /// correctly.
    pub(crate) fn chart_eval_raw(&self, u: &[f64]) -> Result<ChartEval> {
        self.check_point_dim(u)?;
        let dim = self.ambient_dim();
        let s = self.orientation as f64;

        let (x, normal, jac, g_diag, kappa) = match self.kind {
            FamilyKind::RoundSphere => {
                let r = self.r;
                let c = self.b();
                let e = chart::sphere_chart(u);
                let mut x = DVector::zeros(dim);
                let mut normal = DVector::zeros(dim);
                for i in 0..self.n + 1 {
                    x[i] = r * e.omega[i];
                    normal[i] = s * c * e.omega[i];
                }
                x[dim - 1] = c;
                normal[dim - 1] = -s * r;
                let mut jac = DMatrix::zeros(dim, self.n);
                for a in 0..self.n {
                    for i in 0..self.n + 1 {
                        jac[(i, a)] = r * e.jacobian[a * (self.n + 1) + i];
                    }
                }
                let g_diag: Vec<f64> = e.metric_diag.iter().map(|f| r * r * f).collect();
                let kappa = vec![-s * c / r; self.n];
                (x, normal, jac, g_diag, kappa)
            }
            FamilyKind::CliffordTorus => {
                let (a_r, b_r) = (self.a(), self.b());
                let k = self.k;
                let e1 = chart::sphere_chart(&u[..k]);
                let e2 = chart::sphere_chart(&u[k..]);
                let mut x = DVector::zeros(dim);
                let mut normal = DVector::zeros(dim);
                for i in 0..k + 1 {
                    x[i] = a_r * e1.omega[i];
                    normal[i] = -s * b_r * e1.omega[i];
                }
                for i in 0..self.n - k + 1 {
                    x[k + 1 + i] = b_r * e2.omega[i];
                    normal[k + 1 + i] = s * a_r * e2.omega[i];
                }
                let mut jac = DMatrix::zeros(dim, self.n);
                for a in 0..k {
                    for i in 0..k + 1 {
                        jac[(i, a)] = a_r * e1.jacobian[a * (k + 1) + i];
                    }
                }
                let m2 = self.n - k;
                for a in 0..m2 {
                    for i in 0..m2 + 1 {
                        jac[(k + 1 + i, k + a)] = b_r * e2.jacobian[a * (m2 + 1) + i];
                    }
                }
                let mut g_diag = Vec::with_capacity(self.n);
                g_diag.extend(e1.metric_diag.iter().map(|f| a_r * a_r * f));
                g_diag.extend(e2.metric_diag.iter().map(|f| b_r * b_r * f));
                let mut kappa = vec![s * b_r / a_r; k];
                kappa.extend(vec![-s * a_r / b_r; m2]);
                (x, normal, jac, g_diag, kappa)
            }
        };

        let det: f64 = g_diag.iter().product();
        Ok(ChartEval {
            x,
            normal,
            jac,
            g_diag,
            kappa,
            sqrt_det_g: det.max(0.0).sqrt(),
        })
    }

    /// Christoffel symbols Γ^c of the chart metric, one n×n matrix per
    /// upper index. Block diagonal over factors; constant factor scalings
    /// do not change them.
    pub fn christoffels(&self, u: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_point_dim(u)?;
        // reject degenerate points the same way chart_eval does
        self.chart_eval(u)?;
        let n = self.n;
        let mut out = vec![DMatrix::zeros(n, n); n];
        let mut offset = 0;
        for m in self.factor_dims() {
            let block = chart::sphere_christoffels(&u[offset..offset + m]);
            for c in 0..m {
                for a in 0..m {
                    for b in 0..m {
                        out[offset + c][(offset + a, offset + b)] = block[c][a * m + b];
                    }
                }
            }
            offset += m;
        }
        Ok(out)
    }
}

/// Position x(u) ∈ R^{n+2}.
pub fn position(family: &AnalyticFamily, u: &[f64]) -> Result<AmbientVector> {
    Ok(family.chart_eval(u)?.x)
}

/// Unit normal N(u) within S^{n+1}.
pub fn normal(family: &AnalyticFamily, u: &[f64]) -> Result<AmbientVector> {
    Ok(family.chart_eval(u)?.normal)
}

/// Chart tangent basis, the (n+2)×n matrix with columns ∂x/∂u_a.
pub fn tangent_basis(family: &AnalyticFamily, u: &[f64]) -> Result<DMatrix<f64>> {
    Ok(family.chart_eval(u)?.jac)
}

/// Full first/second fundamental form frame at a chart point.
pub fn frame(family: &AnalyticFamily, u: &[f64]) -> Result<GeometryFrame> {
    let e = family.chart_eval(u)?;
    let n = family.n();
    let inv = family.curvature_invariants();
    let mut metric = DMatrix::zeros(n, n);
    let mut shape = DMatrix::zeros(n, n);
    for a in 0..n {
        metric[(a, a)] = e.g_diag[a];
        shape[(a, a)] = e.kappa[a];
    }
    Ok(GeometryFrame {
        position: e.x,
        normal: e.normal,
        metric,
        shape,
        mean_curvature: inv.mean,
        norm_a2: inv.norm_a2,
        norm_phi2: inv.norm_phi2,
    })
}

/// Residual of the shape operator against central differences of the
/// normal: max over chart directions of ‖(N(u+h e_a) − N(u−h e_a))/2h
/// + A(∂_a x)‖_∞. O(h²) for the built-in families.
pub fn fd_shape_residual(family: &AnalyticFamily, u: &[f64], h: f64) -> Result<f64> {
    let e = family.chart_eval(u)?;
    let n = family.n();
    let mut worst = 0.0f64;
    for a in 0..n {
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        up[a] += h;
        um[a] -= h;
        let np = family.chart_eval(&up)?.normal;
        let nm = family.chart_eval(&um)?.normal;
        for i in 0..family.ambient_dim() {
            let dn = (np[i] - nm[i]) / (2.0 * h);
            let target = -e.kappa[a] * e.jac[(i, a)];
            worst = worst.max((dn - target).abs());
        }
    }
    Ok(worst)
}

/// n-volume of the unit sphere S^m: 2, 2π, 4π, 2π², … via the standard
/// two-step recursion vol(S^m) = 2π/(m−1) · vol(S^{m−2}).
pub fn unit_sphere_volume(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => std::f64::consts::TAU,
        _ => std::f64::consts::TAU / (m as f64 - 1.0) * unit_sphere_volume(m - 2),
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // numerators fit comfortably in f64 for every accepted input
    let numer = r.numer();
    let denom = r.denom();
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let n: f64 = numer.magnitude().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = denom.magnitude().to_string().parse().unwrap_or(f64::NAN);
    sign * n / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{families_under_test, sample_point};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn constructor_validation() {
        assert!(AnalyticFamily::round_sphere(1, 0.5).is_err());
        assert!(AnalyticFamily::round_sphere(2, 0.0).is_err());
        assert!(AnalyticFamily::round_sphere(2, 1.2).is_err());
        assert!(AnalyticFamily::clifford_torus(2, 0, 0.5).is_err());
        assert!(AnalyticFamily::clifford_torus(2, 2, 0.5).is_err());
        assert!(AnalyticFamily::clifford_torus(2, 1, 1.0).is_err());
        assert!(AnalyticFamily::clifford_torus_exact_r2(2, 1, 5, 4).is_err());
        assert!(AnalyticFamily::clifford_torus_exact_r2(2, 1, 1, 0).is_err());
        let f = AnalyticFamily::clifford_torus(2, 1, 0.5).unwrap();
        assert!(f.clone().with_orientation(2).is_err());
        assert!(f.with_orientation(-1).is_ok());
    }

    #[test]
    fn clifford_position_examples() {
        let f = AnalyticFamily::clifford_torus(2, 1, FRAC_1_SQRT_2).unwrap();
        let x = position(&f, &[0.0, 0.0]).unwrap();
        for (got, want) in x.iter().zip([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }

        let f = AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap();
        let x = position(&f, &[PI / 2.0, 0.0]).unwrap();
        for (got, want) in x.iter().zip([0.0, 0.6, 0.8, 0.0]) {
            assert!((got - want).abs() < 1e-15, "got {got} want {want}");
        }
    }

    #[test]
    fn equator_sits_in_the_hyperplane() {
        let f = AnalyticFamily::round_sphere(2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u = sample_point(&f, &mut rng);
            let x = position(&f, &u).unwrap();
            assert!(x[3].abs() < 1e-15);
            let nrm = normal(&f, &u).unwrap();
            assert!((nrm[3] + 1.0).abs() < 1e-15, "equator normal is -e4");
        }
    }

    #[test]
    fn frame_invariants_hold_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in families_under_test() {
            for _ in 0..120 {
                let u = sample_point(&family, &mut rng);
                let fr = frame(&family, &u).unwrap();
                let x = &fr.position;
                let nrm = &fr.normal;
                assert!((x.norm() - 1.0).abs() < 1e-12, "{}", family.describe());
                assert!((nrm.norm() - 1.0).abs() < 1e-12);
                assert!(x.dot(nrm).abs() < 1e-12);

                // tangent columns orthogonal to both x and N, metric = J^T J
                let jac = tangent_basis(&family, &u).unwrap();
                for a in 0..family.n() {
                    let col = jac.column(a);
                    assert!(col.dot(x).abs() < 1e-12);
                    assert!(col.dot(nrm).abs() < 1e-12);
                    for b in 0..family.n() {
                        let want = if a == b { fr.metric[(a, a)] } else { 0.0 };
                        assert!((col.dot(&jac.column(b)) - want).abs() < 1e-11);
                    }
                }

                // g·A symmetric (trivially, both diagonal) and defect identity
                let ga = &fr.metric * &fr.shape;
                let asym = (&ga - ga.transpose()).abs().max();
                assert!(asym < 1e-10);
                let n = family.n() as f64;
                assert!(
                    (fr.norm_phi2 - (fr.norm_a2 - n * fr.mean_curvature * fr.mean_curvature))
                        .abs()
                        < 1e-12
                );
            }
        }
    }

    #[test]
    fn curvature_invariants_frozen_values() {
        // r = 0.6, n = 2, k = 1: H = 7/24, |A|² = 337/144, |φ|² = 625/288.
        let f = AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap();
        let ci = f.curvature_invariants();
        assert!((ci.mean - 7.0 / 24.0).abs() < 1e-13, "H = {}", ci.mean);
        assert!((ci.norm_a2 - 337.0 / 144.0).abs() < 1e-12);
        assert!((ci.norm_phi2 - 625.0 / 288.0).abs() < 1e-12);
        assert!((ci.hypothesis_gap - 2.0).abs() < 1e-12);

        let f = AnalyticFamily::minimal_clifford(2, 1).unwrap();
        let ci = f.curvature_invariants();
        assert!(ci.mean.abs() < 1e-14);
        assert!((ci.norm_a2 - 2.0).abs() < 1e-13);
        assert!((ci.norm_phi2 - 2.0).abs() < 1e-13);

        let f = AnalyticFamily::round_sphere(2, 0.8).unwrap();
        let ci = f.curvature_invariants();
        assert!((ci.abs_mean - 0.75).abs() < 1e-13);
        assert!((ci.norm_a2 - 2.0 * 0.75 * 0.75).abs() < 1e-12);
        assert_eq!(ci.norm_phi2, 0.0);
        assert!((ci.hypothesis_gap + 2.0 * 0.75 * 0.75).abs() < 1e-12);
        assert!(f.is_umbilical());

        let f = AnalyticFamily::round_sphere(2, 1.0).unwrap();
        let ci = f.curvature_invariants();
        assert_eq!(ci.mean, 0.0);
        assert_eq!(ci.norm_a2, 0.0);
        assert!(f.is_umbilical());
    }

    #[test]
    fn hypothesis_gap_is_two_for_surface_tori() {
        // n = 2: |A|² − 4H² = −2·κ₁κ₂ = 2 for every r.
        for r in [0.2, 0.45, 0.5, 0.6, FRAC_1_SQRT_2, 0.8, 0.93] {
            let f = AnalyticFamily::clifford_torus(2, 1, r).unwrap();
            assert!((f.curvature_invariants().hypothesis_gap - 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn mean_curvature_formula_and_orientation() {
        for (n, k, r) in [(2, 1, 0.6), (3, 1, 0.55), (4, 2, 0.71), (5, 3, 0.44)] {
            let f = AnalyticFamily::clifford_torus(n, k, r).unwrap();
            let (a, b) = (f.a(), f.b());
            let want = (k as f64 * b / a - (n - k) as f64 * a / b) / n as f64;
            assert!((f.curvature_invariants().mean - want).abs() < 1e-13);

            let flipped = f.clone().with_orientation(-1).unwrap();
            let ci = flipped.curvature_invariants();
            assert!((ci.mean + want).abs() < 1e-13);
            assert!((ci.norm_a2 - f.curvature_invariants().norm_a2).abs() < 1e-13);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let u = sample_point(&f, &mut rng);
            let n_plus = normal(&f, &u).unwrap();
            let n_minus = normal(&flipped, &u).unwrap();
            assert!((n_plus + n_minus).norm() < 1e-14);
        }
    }

    #[test]
    fn shape_operator_matches_normal_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for family in families_under_test() {
            for _ in 0..25 {
                let u = sample_point(&family, &mut rng);
                let res = fd_shape_residual(&family, &u, 1e-5).unwrap();
                assert!(res < 1e-6, "{}: residual {res:.3e}", family.describe());
            }
        }
    }

    #[test]
    fn degenerate_chart_points_are_rejected() {
        let f = AnalyticFamily::round_sphere(3, 0.9).unwrap();
        assert!(matches!(
            f.chart_eval(&[0.0, 1.0, 1.0]),
            Err(Error::DegenerateChart(_))
        ));
        let f = AnalyticFamily::clifford_torus(4, 2, 0.5).unwrap();
        assert!(matches!(
            f.chart_eval(&[PI, 0.3, 0.4, 0.5]),
            Err(Error::DegenerateChart(_))
        ));
        // dimension mismatch is a parameter error
        assert!(matches!(
            f.chart_eval(&[0.3, 0.4]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn closed_form_areas() {
        let f = AnalyticFamily::minimal_clifford(2, 1).unwrap();
        assert!((f.area() - 2.0 * PI * PI).abs() < 1e-12);
        let f = AnalyticFamily::round_sphere(2, 0.8).unwrap();
        assert!((f.area() - 4.0 * PI * 0.64).abs() < 1e-12);
        assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((unit_sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn christoffels_vanish_on_flat_torus_charts() {
        let f = AnalyticFamily::clifford_torus(2, 1, 0.6).unwrap();
        let gamma = f.christoffels(&[1.0, 2.0]).unwrap();
        for g in &gamma {
            assert!(g.abs().max() == 0.0);
        }
    }

    #[test]
    fn christoffels_match_metric_differences_for_products() {
        // cross-check the block assembly on a torus with a polar factor
        let f = AnalyticFamily::clifford_torus(4, 2, 0.63).unwrap();
        let u = [0.8, 1.7, 1.1, 2.9];
        let n = 4;
        let h = 1e-6;
        let gamma = f.christoffels(&u).unwrap();
        let g_at = |u: &[f64]| f.chart_eval(u).unwrap().g_diag;
        let g0 = g_at(&u);
        let grads: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                let mut up = u;
                let mut um = u;
                up[a] += h;
                um[a] -= h;
                let gp = g_at(&up);
                let gm = g_at(&um);
                (0..n).map(|i| (gp[i] - gm[i]) / (2.0 * h)).collect()
            })
            .collect();
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let t1 = if b == c { grads[a][c] } else { 0.0 };
                    let t2 = if a == c { grads[b][c] } else { 0.0 };
                    let t3 = if a == b { grads[c][a] } else { 0.0 };
                    let expect = 0.5 / g0[c] * (t1 + t2 - t3);
                    assert!(
                        (gamma[c][(a, b)] - expect).abs() < 1e-6,
                        "Γ^{c}_{a}{b}"
                    );
                }
            }
        }
    }
}
