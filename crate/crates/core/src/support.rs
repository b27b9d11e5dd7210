//! Support functions of the ambient coordinates and their variational
//! identities.
//!
//! For a fixed ambient vector v ∈ R^{n+2} the two support functions on a
//! hypersurface x: M^n → S^{n+1} with unit normal N are
//!
//! * l_v = ⟨x, v⟩, the position support, and
//! * f_v = ⟨N, v⟩, the normal support,
//!
//! together with the combination ψ_v = l_v − H·f_v that feeds the second
//! variation. The ambient vector splits orthogonally as
//! v = vᵀ + l_v·x + f_v·N with vᵀ tangent, and the gradients are
//! ∇l_v = vᵀ, ∇f_v = −A(vᵀ). For hypersurfaces with constant H and
//! parallel shape operator the second derivatives close up:
//!
//! * Hess l_v = −l_v·g + f_v·(g·A),
//! * Hess f_v = l_v·(g·A) − A^T·g·A,
//! * Δl_v = −n·l_v + n·H·f_v,
//! * Δf_v = n·H·l_v − |A|²·f_v,
//!
//! which combine into J ψ_v = Δψ_v + (|A|² + n)·ψ_v = |φ|²·l_v for the
//! stability operator J. The companion relation
//! J f_v = n·H·l_v + n·f_v is the Δf_v line plus the definition of J,
//! so it carries no residual of its own. [`identity_residuals`]
//! verifies all five identities against finite differences; [`q_form`] evaluates the
//! quadratic form Q(φ) = ∫ |∇φ|² − (|A|²+n)·φ² dA by quadrature, with an
//! independent dual route −∫ ψ_v·(Jψ_v) dA for the support combination;
//! [`family_moments`] accumulates every second moment the reporting layer
//! needs in a single sweep.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{AmbientVector, AnalyticFamily, ChartEval};
use crate::quad::{self, QuadratureSpec};

/// Pointwise support data for one ambient vector.
#[derive(Clone, Debug)]
pub struct SupportSample {
    /// l_v = ⟨x, v⟩.
    pub l: f64,
    /// f_v = ⟨N, v⟩.
    pub f: f64,
    /// ψ_v = l_v − H·f_v.
    pub psi: f64,
    /// Tangential part vᵀ = v − l_v·x − f_v·N.
    pub tangential: AmbientVector,
    /// ∇l_v = vᵀ, as an ambient vector.
    pub grad_l: AmbientVector,
    /// ∇f_v = −A(vᵀ), as an ambient vector.
    pub grad_f: AmbientVector,
}

/// Scalar fields the quadratic form accepts.
pub enum TestFunction {
    /// ψ_v = l_v − H·f_v.
    Psi(AmbientVector),
    /// l_v = ⟨x, v⟩.
    PositionSupport(AmbientVector),
    /// f_v = ⟨N, v⟩.
    NormalSupport(AmbientVector),
    /// Arbitrary scalar in chart coordinates; gradients fall back to
    /// central differences.
    Custom(Box<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

/// Value of Q(φ) = ∫ |∇φ|² − (|A|²+n)·φ² dA.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QFormResult {
    /// Direct quadrature of the Dirichlet form.
    pub value: f64,
    /// Independent route −∫ φ·(Jφ) dA, available when Jφ is known in
    /// closed form (the ψ_v family); None otherwise.
    pub dual_value: Option<f64>,
}

/// Finite-difference residuals of the support-function identities.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub max_hess_l: f64,
    pub max_hess_f: f64,
    pub max_lap_l: f64,
    pub max_lap_f: f64,
    /// Residual of J ψ_v = |φ|²·l_v.
    pub max_jacobi_psi: f64,
    pub samples: usize,
    /// Samples discarded because a stencil point left the chart.
    pub skipped: usize,
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        self.max_hess_l
            .max(self.max_hess_f)
            .max(self.max_lap_l)
            .max(self.max_lap_f)
            .max(self.max_jacobi_psi)
    }
}

/// ∫ ψ_v dA and the same integral normalized by ∫ |ψ_v| dA.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeanZeroReport {
    pub integral: f64,
    pub relative: f64,
}

/// Both sides of n·H·∫ f_v·l_v dA = −∫ |∇l_v|² dA + n·∫ l_v² dA.
#[derive(Clone, Copy, Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegralIdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// D(v) = ∫ |∇l_v|² − n·∫ l_v², the quantity whose sign enters the
    /// index bound hypotheses; equals −lhs when the identity holds.
    pub d_value: f64,
}

/// Second moments of one family, accumulated in a single quadrature
/// sweep. All matrices are (n+2)×(n+2) in ambient coordinates.
#[derive(Clone, Debug)]
pub struct FamilyMoments {
    pub n: usize,
    pub area: f64,
    pub mean_curvature: f64,
    pub norm_phi2: f64,
    /// ∫ x xᵀ dA.
    pub xx: DMatrix<f64>,
    /// ∫ N Nᵀ dA.
    pub nn: DMatrix<f64>,
    /// ∫ x Nᵀ dA.
    pub xn: DMatrix<f64>,
    /// Dirichlet-route matrix: vᵀ·q_psi·v = Q(ψ_v).
    pub q_psi: DMatrix<f64>,
    /// Gram matrix ∫ (x−HN)(x−HN)ᵀ dA, entries ∫ ψ_u ψ_v dA.
    pub gram_psi: DMatrix<f64>,
    /// ∫ (x−HN) dA, entries ∫ ψ_v dA.
    pub mean_psi: DVector<f64>,
}

fn check_vector_dim(family: &AnalyticFamily, v: &AmbientVector) -> Result<()> {
    if v.len() != family.ambient_dim() {
        return Err(Error::Parameter(format!(
            "ambient vector has {} components, family {} needs {}",
            v.len(),
            family.describe(),
            family.ambient_dim()
        )));
    }
    Ok(())
}

fn sample_from_eval(family: &AnalyticFamily, v: &AmbientVector, e: &ChartEval) -> SupportSample {
    let l = e.x.dot(v);
    let f = e.normal.dot(v);
    let h = family.curvature_invariants().mean;
    let tangential = v - l * &e.x - f * &e.normal;
    let mut grad_f = DVector::zeros(family.ambient_dim());
    for a in 0..family.n() {
        let col = e.jac.column(a);
        // chart component of vᵀ in direction a
        let t_a = col.dot(v) / e.g_diag[a];
        grad_f.axpy(-e.kappa[a] * t_a, &col, 1.0);
    }
    SupportSample {
        l,
        f,
        psi: l - h * f,
        grad_l: tangential.clone(),
        tangential,
        grad_f,
    }
}

/// Support data at a chart point.
pub fn support_sample(
    family: &AnalyticFamily,
    v: &AmbientVector,
    u: &[f64],
) -> Result<SupportSample> {
    check_vector_dim(family, v)?;
    let e = family.chart_eval(u)?;
    Ok(sample_from_eval(family, v, &e))
}

/// Value of the test function at a chart evaluation.
fn tf_value(family: &AnalyticFamily, tf: &TestFunction, e: &ChartEval, u: &[f64]) -> f64 {
    match tf {
        TestFunction::Psi(v) => {
            let h = family.curvature_invariants().mean;
            e.x.dot(v) - h * e.normal.dot(v)
        }
        TestFunction::PositionSupport(v) => e.x.dot(v),
        TestFunction::NormalSupport(v) => e.normal.dot(v),
        TestFunction::Custom(f) => f(u),
    }
}

/// |∇φ|² at a chart evaluation. The support gradients are closed form;
/// Custom fields use central differences in the chart.
fn tf_grad_sq(family: &AnalyticFamily, tf: &TestFunction, e: &ChartEval, u: &[f64]) -> f64 {
    let h_mean = family.curvature_invariants().mean;
    let mut acc = 0.0;
    match tf {
        TestFunction::Custom(f) => {
            let h = 1e-5;
            let mut up = u.to_vec();
            for a in 0..family.n() {
                let u0 = up[a];
                up[a] = u0 + h;
                let fp = f(&up);
                up[a] = u0 - h;
                let fm = f(&up);
                up[a] = u0;
                let d = (fp - fm) / (2.0 * h);
                acc += d * d / e.g_diag[a];
            }
        }
        _ => {
            for a in 0..family.n() {
                let proj = match tf {
                    TestFunction::Psi(v) => {
                        // ∇ψ = (I + H·A)vᵀ, diagonal in the chart basis
                        (1.0 + h_mean * e.kappa[a]) * e.jac.column(a).dot(v)
                    }
                    TestFunction::PositionSupport(v) => e.jac.column(a).dot(v),
                    TestFunction::NormalSupport(v) => -e.kappa[a] * e.jac.column(a).dot(v),
                    TestFunction::Custom(_) => unreachable!(),
                };
                acc += proj * proj / e.g_diag[a];
            }
        }
    }
    acc
}

/// Q(φ) = ∫ |∇φ|² − (|A|²+n)·φ² dA, plus the dual route for ψ_v.
pub fn q_form(
    family: &AnalyticFamily,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<QFormResult> {
    match tf {
        TestFunction::Psi(v) | TestFunction::PositionSupport(v) | TestFunction::NormalSupport(v) => {
            check_vector_dim(family, v)?
        }
        TestFunction::Custom(_) => {}
    }
    let pot = family.stability_potential();
    let inv = family.curvature_invariants();
    let mut value = 0.0;
    let mut dual = 0.0;
    quad::sweep(family, spec, |e, u, w| {
        let phi = tf_value(family, tf, e, u);
        value += w * (tf_grad_sq(family, tf, e, u) - pot * phi * phi);
        if let TestFunction::Psi(v) = tf {
            // J ψ_v = |φ|²·l_v in closed form
            dual -= w * phi * inv.norm_phi2 * e.x.dot(v);
        }
    })?;
    let dual_value = matches!(tf, TestFunction::Psi(_)).then_some(dual);
    Ok(QFormResult { value, dual_value })
}

/// ∫ ψ_v dA, absolute and relative to ∫ |ψ_v| dA.
pub fn mean_zero_check(
    family: &AnalyticFamily,
    v: &AmbientVector,
    spec: &QuadratureSpec,
) -> Result<MeanZeroReport> {
    check_vector_dim(family, v)?;
    let h = family.curvature_invariants().mean;
    let mut integral = 0.0;
    let mut abs_integral = 0.0;
    quad::sweep(family, spec, |e, _, w| {
        let psi = e.x.dot(v) - h * e.normal.dot(v);
        integral += w * psi;
        abs_integral += w * psi.abs();
    })?;
    Ok(MeanZeroReport {
        integral,
        relative: integral.abs() / abs_integral.max(1.0),
    })
}

/// Check n·H·∫ f_v·l_v = −∫ |∇l_v|² + n·∫ l_v² by quadrature.
pub fn integral_identity_check(
    family: &AnalyticFamily,
    v: &AmbientVector,
    spec: &QuadratureSpec,
) -> Result<IntegralIdentityReport> {
    check_vector_dim(family, v)?;
    let n = family.n() as f64;
    let h = family.curvature_invariants().mean;
    let (mut int_fl, mut int_grad, mut int_l2) = (0.0, 0.0, 0.0);
    quad::sweep(family, spec, |e, _, w| {
        let l = e.x.dot(v);
        let f = e.normal.dot(v);
        int_fl += w * f * l;
        int_l2 += w * l * l;
        // |∇l|² = |vᵀ|² via the orthogonal decomposition of v
        int_grad += w * (v.norm_squared() - l * l - f * f);
    })?;
    let lhs = n * h * int_fl;
    let rhs = -int_grad + n * int_l2;
    Ok(IntegralIdentityReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        d_value: int_grad - n * int_l2,
    })
}

/// Accumulate all ambient second moments in one sweep.
pub fn family_moments(family: &AnalyticFamily, spec: &QuadratureSpec) -> Result<FamilyMoments> {
    let dim = family.ambient_dim();
    let n = family.n();
    let inv = family.curvature_invariants();
    let h = inv.mean;
    let pot = family.stability_potential();

    let mut area = 0.0;
    let mut xx = DMatrix::zeros(dim, dim);
    let mut nn = DMatrix::zeros(dim, dim);
    let mut xn = DMatrix::zeros(dim, dim);
    let mut q_psi = DMatrix::zeros(dim, dim);
    let mut gram = DMatrix::zeros(dim, dim);
    let mut mean = DVector::zeros(dim);
    let mut p = DVector::zeros(dim);

    quad::sweep(family, spec, |e, _, w| {
        area += w;
        // p = x − H·N, so ψ_v = ⟨p, v⟩
        for i in 0..dim {
            p[i] = e.x[i] - h * e.normal[i];
        }
        for i in 0..dim {
            let (xi, ni, pi) = (e.x[i], e.normal[i], p[i]);
            mean[i] += w * pi;
            for j in 0..dim {
                xx[(i, j)] += w * xi * e.x[j];
                nn[(i, j)] += w * ni * e.normal[j];
                xn[(i, j)] += w * xi * e.normal[j];
                gram[(i, j)] += w * pi * p[j];
                q_psi[(i, j)] -= w * pot * pi * p[j];
            }
        }
        // Dirichlet part: Σ_a (1+Hκ_a)²/g_a · (∂_a x)(∂_a x)ᵀ
        for a in 0..n {
            let col = e.jac.column(a);
            let c = (1.0 + h * e.kappa[a]).powi(2) / e.g_diag[a];
            for i in 0..dim {
                let ci = w * c * col[i];
                for j in 0..dim {
                    q_psi[(i, j)] += ci * col[j];
                }
            }
        }
    })?;

    Ok(FamilyMoments {
        n,
        area,
        mean_curvature: h,
        norm_phi2: inv.norm_phi2,
        xx,
        nn,
        xn,
        q_psi,
        gram_psi: gram,
        mean_psi: mean,
    })
}

impl FamilyMoments {
    /// Q(ψ_v) from the accumulated Dirichlet-route matrix.
    pub fn q_of(&self, v: &AmbientVector) -> f64 {
        (v.transpose() * &self.q_psi * v)[(0, 0)]
    }

    /// Q(ψ_v) by the dual route −|φ|²·∫ l_v·ψ_v dA, assembled from the
    /// plain moment matrices.
    pub fn q_dual_of(&self, v: &AmbientVector) -> f64 {
        let m = &self.xx - self.mean_curvature * (&self.xn + self.xn.transpose()) * 0.5;
        -self.norm_phi2 * (v.transpose() * m * v)[(0, 0)]
    }

    /// D-matrix with vᵀ·D·v = ∫ |∇l_v|² − n·∫ l_v².
    pub fn d_matrix(&self) -> DMatrix<f64> {
        let dim = self.xx.nrows();
        let nf = self.n as f64;
        DMatrix::identity(dim, dim) * self.area - (nf + 1.0) * &self.xx - &self.nn
    }

    pub fn d_of(&self, v: &AmbientVector) -> f64 {
        (v.transpose() * self.d_matrix() * v)[(0, 0)]
    }

    /// ∫ ψ_v dA.
    pub fn mean_of(&self, v: &AmbientVector) -> f64 {
        self.mean_psi.dot(v)
    }
}

/// Verify the five pointwise identities by finite differences at random
/// chart points. Chart Hessians use the h² central stencils, corrected by
/// the closed-form Christoffel symbols.
pub fn identity_residuals(
    family: &AnalyticFamily,
    v: &AmbientVector,
    samples: usize,
) -> Result<IdentityReport> {
    check_vector_dim(family, v)?;
    let n = family.n();
    let inv = family.curvature_invariants();
    let (h_mean, pot) = (inv.mean, family.stability_potential());
    let fd_h = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1D5EED);
    let mut report = IdentityReport {
        max_hess_l: 0.0,
        max_hess_f: 0.0,
        max_lap_l: 0.0,
        max_lap_f: 0.0,
        max_jacobi_psi: 0.0,
        samples,
        skipped: 0,
    };

    // value of (l, f) at a chart point, degenerate points bubbling up
    let lf = |u: &[f64]| -> Result<(f64, f64)> {
        let e = family.chart_eval(u)?;
        Ok((e.x.dot(v), e.normal.dot(v)))
    };

    'sample: for _ in 0..samples {
        let u: Vec<f64> = (0..n)
            .map(|a| {
                if family.dim_is_periodic(a) {
                    rng.random::<f64>() * 2.0 * PI
                } else {
                    0.4 + rng.random::<f64>() * (PI - 0.8)
                }
            })
            .collect();

        let center = match (family.chart_eval(&u), family.christoffels(&u)) {
            (Ok(e), Ok(g)) => (e, g),
            _ => {
                report.skipped += 1;
                continue;
            }
        };
        let (e0, gamma) = center;
        let (l0, f0) = (e0.x.dot(v), e0.normal.dot(v));

        // first derivatives and pure second stencils, one dimension at a time
        let mut d1 = vec![(0.0, 0.0); n];
        let mut d2 = vec![vec![(0.0, 0.0); n]; n];
        let mut probe = u.clone();
        for a in 0..n {
            let u0 = probe[a];
            probe[a] = u0 + fd_h;
            let Ok(pl) = lf(&probe) else {
                report.skipped += 1;
                probe[a] = u0;
                continue 'sample;
            };
            probe[a] = u0 - fd_h;
            let Ok(mi) = lf(&probe) else {
                report.skipped += 1;
                probe[a] = u0;
                continue 'sample;
            };
            probe[a] = u0;
            d1[a] = ((pl.0 - mi.0) / (2.0 * fd_h), (pl.1 - mi.1) / (2.0 * fd_h));
            d2[a][a] = (
                (pl.0 - 2.0 * l0 + mi.0) / (fd_h * fd_h),
                (pl.1 - 2.0 * f0 + mi.1) / (fd_h * fd_h),
            );
        }
        for a in 0..n {
            for b in 0..a {
                let mut acc = (0.0, 0.0);
                let mut fail = false;
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let (ua, ub) = (probe[a], probe[b]);
                    probe[a] = ua + sa * fd_h;
                    probe[b] = ub + sb * fd_h;
                    match lf(&probe) {
                        Ok(val) => {
                            acc.0 += sa * sb * val.0;
                            acc.1 += sa * sb * val.1;
                        }
                        Err(_) => fail = true,
                    }
                    probe[a] = ua;
                    probe[b] = ub;
                }
                if fail {
                    report.skipped += 1;
                    continue 'sample;
                }
                let scale = 4.0 * fd_h * fd_h;
                d2[a][b] = (acc.0 / scale, acc.1 / scale);
                d2[b][a] = d2[a][b];
            }
        }

        let (mut lap_l, mut lap_f) = (0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                let mut hess_l = d2[a][b].0;
                let mut hess_f = d2[a][b].1;
                for c in 0..n {
                    hess_l -= gamma[c][(a, b)] * d1[c].0;
                    hess_f -= gamma[c][(a, b)] * d1[c].1;
                }
                // targets are diagonal: −l·g + f·(gA) and l·(gA) − AᵀgA
                let (want_l, want_f) = if a == b {
                    let (g, k) = (e0.g_diag[a], e0.kappa[a]);
                    (g * (-l0 + f0 * k), g * k * (l0 - k * f0)
                    )
                } else {
                    (0.0, 0.0)
                };
                report.max_hess_l = report.max_hess_l.max((hess_l - want_l).abs());
                report.max_hess_f = report.max_hess_f.max((hess_f - want_f).abs());
                if a == b {
                    lap_l += hess_l / e0.g_diag[a];
                    lap_f += hess_f / e0.g_diag[a];
                }
            }
        }

        let nf = n as f64;
        let want_lap_l = -nf * l0 + nf * h_mean * f0;
        let want_lap_f = nf * h_mean * l0 - inv.norm_a2 * f0;
        report.max_lap_l = report.max_lap_l.max((lap_l - want_lap_l).abs());
        report.max_lap_f = report.max_lap_f.max((lap_f - want_lap_f).abs());

        let psi0 = l0 - h_mean * f0;
        let lap_psi = lap_l - h_mean * lap_f;
        let jpsi = lap_psi + pot * psi0;
        report.max_jacobi_psi = report
            .max_jacobi_psi
            .max((jpsi - inv.norm_phi2 * l0).abs());
    }
    Ok(report)
}
