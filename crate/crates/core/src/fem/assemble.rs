//! P1 element assembly of the stability pencil on the surface torus.
//!
//! On the chart the pullback metric is diagonal, so for a scalar u the
//! three bilinear forms of the discrete pencil are
//!
//! * stiffness  K[u,w] = ∫ ∇u·g⁻¹·∇w √det g,
//! * mass       M[u,w] = ∫ u·w √det g,
//! * potential  V[u,w] = ∫ (|A|²+n)·u·w √det g,
//!
//! and the strong index is the number of negative eigenvalues of the
//! pencil (K − V)x = μ·M·x. Element integrals use the three-point
//! edge-midpoint rule, which integrates quadratics exactly; metric and
//! potential are sampled at the quadrature points, so the assembly stays
//! correct for coordinate-dependent coefficients even though the built-in
//! torus chart happens to be flat. All three matrices share one symbolic
//! pattern and their element contributions are exactly symmetric, so the
//! assembled matrices are symmetric to the last bit.

use crate::error::{Error, Result};
use crate::geometry::{AnalyticFamily, FamilyKind};

use super::mesh::TorusMesh;
use super::sparse::{CsrBuilder, CsrMatrix};

/// Discrete stability pencil (K − V, M) on a torus mesh.
#[derive(Clone, Debug)]
pub struct StabilityPencil {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    pub v: CsrMatrix,
    pub mesh: TorusMesh,
    /// Upper bound of the potential over the mesh, used to place the
    /// spectral shift.
    pub max_potential: f64,
}

impl StabilityPencil {
    pub fn dim(&self) -> usize {
        self.k.dim()
    }
}

/// Assemble the pencil for a surface torus S¹(a) × S¹(b).
pub fn assemble(family: &AnalyticFamily, mesh: &TorusMesh) -> Result<StabilityPencil> {
    if family.kind() != FamilyKind::CliffordTorus || family.n() != 2 {
        return Err(Error::UnsupportedFamily(format!(
            "finite element discretization covers surface tori only, got {}",
            family.describe()
        )));
    }
    let pot = family.stability_potential();
    let fam = family.clone();
    assemble_with(mesh, move |u| {
        let e = fam.chart_eval_raw(u).expect("torus chart is never degenerate");
        ((e.g_diag[0], e.g_diag[1]), pot)
    })
}

/// Assemble the flat pencil (unit metric, zero potential); the analytic
/// eigenvalues p² + q² make this the reference oracle for the solver.
pub fn assemble_flat(mesh: &TorusMesh) -> StabilityPencil {
    assemble_with(mesh, |_| ((1.0, 1.0), 0.0)).expect("flat assembly cannot fail")
}

fn assemble_with(
    mesh: &TorusMesh,
    coeffs: impl Fn(&[f64]) -> ((f64, f64), f64),
) -> Result<StabilityPencil> {
    let n = mesh.num_nodes();
    let mut builder = CsrBuilder::new(n);
    for t in mesh.triangles() {
        for a in 0..3 {
            for b in a..3 {
                builder.insert_pair(t.nodes[a], t.nodes[b]);
            }
        }
    }
    let mut k = builder.finalize();
    let mut m = k.same_pattern();
    let mut v = k.same_pattern();
    let mut max_potential = f64::NEG_INFINITY;

    // barycentric values at the three edge midpoints
    const MIDPOINTS: [[f64; 3]; 3] = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];

    for t in mesh.triangles() {
        let [p0, p1, p2] = t.coords;
        let d1 = [p1[0] - p0[0], p1[1] - p0[1]];
        let d2 = [p2[0] - p0[0], p2[1] - p0[1]];
        let det = d1[0] * d2[1] - d2[0] * d1[1];
        // P1 gradients in chart coordinates
        let grads = [
            [(-d2[1] + d1[1]) / det, (d2[0] - d1[0]) / det],
            [d2[1] / det, -d2[0] / det],
            [-d1[1] / det, d1[0] / det],
        ];
        let w_q = det / 2.0 / 3.0;

        let mut ke = [[0.0f64; 3]; 3];
        let mut me = [[0.0f64; 3]; 3];
        let mut ve = [[0.0f64; 3]; 3];
        for lam in MIDPOINTS {
            let uq = [
                lam[0] * p0[0] + lam[1] * p1[0] + lam[2] * p2[0],
                lam[0] * p0[1] + lam[1] * p1[1] + lam[2] * p2[1],
            ];
            let ((g1, g2), pot) = coeffs(&uq);
            let sqrt_g = (g1 * g2).sqrt();
            max_potential = max_potential.max(pot);
            for a in 0..3 {
                for b in 0..3 {
                    let grad = grads[a][0] * grads[b][0] / g1 + grads[a][1] * grads[b][1] / g2;
                    let mass = lam[a] * lam[b];
                    ke[a][b] += w_q * sqrt_g * grad;
                    me[a][b] += w_q * sqrt_g * mass;
                    ve[a][b] += w_q * sqrt_g * pot * mass;
                }
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                k.add(t.nodes[a], t.nodes[b], ke[a][b]);
                m.add(t.nodes[a], t.nodes[b], me[a][b]);
                v.add(t.nodes[a], t.nodes[b], ve[a][b]);
            }
        }
    }

    Ok(StabilityPencil {
        k,
        m,
        v,
        mesh: mesh.clone(),
        max_potential,
    })
}
