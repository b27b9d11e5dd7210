//! Hyperspherical coordinate charts on unit spheres.
//!
//! The unit sphere S^m ⊂ R^{m+1} is parametrized by angles
//! θ = (θ_1, …, θ_m) with θ_1, …, θ_{m−1} ∈ (0, π) polar and θ_m ∈ [0, 2π)
//! periodic:
//!
//! ```text
//! ω_1     = cos θ_1
//! ω_i     = sin θ_1 ⋯ sin θ_{i−1} · cos θ_i          (2 ≤ i ≤ m)
//! ω_{m+1} = sin θ_1 ⋯ sin θ_m
//! ```
//!
//! The pullback metric is diagonal, g_aa = f_a(θ) with
//! f_a = ∏_{j<a} sin²θ_j, and the only nonzero Christoffel symbols are
//!
//! ```text
//! Γ^c_{aa} = −(f_a / f_c) · cot θ_c        (c < a)
//! Γ^a_{ab} = Γ^a_{ba} = cot θ_b            (b < a)
//! ```
//!
//! For m = 1 the chart is the plain angle chart of the circle and every
//! Christoffel symbol vanishes.

/// Chart data of the unit sphere S^m at a single point.
///
/// `omega` has length m+1, `jacobian` is the (m+1)×m matrix of columns
/// ∂ω/∂θ_a stored column-major, `metric_diag` holds f_a = ∏_{j<a} sin²θ_j.
pub(crate) struct SphereChartEval {
    pub omega: Vec<f64>,
    pub jacobian: Vec<f64>,
    pub metric_diag: Vec<f64>,
}

/// Which coordinate directions of the S^m chart are periodic.
///
/// The final angle is periodic with period 2π; for m ≥ 2 the leading m−1
/// angles are polar with domain (0, π).
pub(crate) fn sphere_dim_is_periodic(m: usize, a: usize) -> bool {
    debug_assert!(a < m);
    a == m - 1
}

/// Evaluate the S^m chart at `theta` (length m).
pub(crate) fn sphere_chart(theta: &[f64]) -> SphereChartEval {
    let m = theta.len();
    let sin: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let cos: Vec<f64> = theta.iter().map(|t| t.cos()).collect();

    // Prefix products p[i] = sin θ_1 ⋯ sin θ_i, p[0] = 1.
    let mut prefix = vec![1.0; m + 1];
    for i in 0..m {
        prefix[i + 1] = prefix[i] * sin[i];
    }

    let mut omega = vec![0.0; m + 1];
    for i in 0..m {
        omega[i] = prefix[i] * cos[i];
    }
    omega[m] = prefix[m];

    // Column a holds ∂ω/∂θ_a. Component i of column a:
    //   i < a:       0
    //   i == a:      −p[a] sin θ_a  (= −p[a+1] when written with prefix)
    //   a < i ≤ m−1: (∏_{j<i, j≠a} sin θ_j) cos θ_a cos θ_i
    //   i == m:      (∏_{j≤m−1, j≠a} sin θ_j) cos θ_a
    let mut jacobian = vec![0.0; (m + 1) * m];
    for a in 0..m {
        let col = &mut jacobian[a * (m + 1)..(a + 1) * (m + 1)];
        col[a] = -prefix[a] * sin[a];
        // q = ∏_{j<i, j≠a} sin θ_j, built without dividing so the formula
        // stays finite at chart-degenerate points.
        let mut q = prefix[a];
        for i in (a + 1)..m {
            col[i] = q * cos[a] * cos[i];
            q *= sin[i];
        }
        col[m] = q * cos[a];
    }

    let mut metric_diag = vec![0.0; m];
    for a in 0..m {
        metric_diag[a] = prefix[a] * prefix[a];
    }

    SphereChartEval {
        omega,
        jacobian,
        metric_diag,
    }
}

/// Christoffel symbols of the S^m chart at `theta`.
///
/// Returns m matrices Γ^c, each m×m row-major, so that
/// `gamma[c][a*m + b]` = Γ^c_{ab}. Constant rescalings of the metric leave
/// these unchanged, so the same symbols serve a sphere of any radius.
pub(crate) fn sphere_christoffels(theta: &[f64]) -> Vec<Vec<f64>> {
    let m = theta.len();
    let eval = sphere_chart(theta);
    let f = &eval.metric_diag;
    let cot: Vec<f64> = theta.iter().map(|t| t.cos() / t.sin()).collect();

    let mut gamma = vec![vec![0.0; m * m]; m];
    for a in 0..m {
        for c in 0..a {
            gamma[c][a * m + a] = -(f[a] / f[c]) * cot[c];
        }
        for b in 0..a {
            gamma[a][a * m + b] = cot[b];
            gamma[a][b * m + a] = cot[b];
        }
    }
    gamma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn circle_chart_is_cos_sin() {
        let e = sphere_chart(&[0.7]);
        assert!((e.omega[0] - 0.7f64.cos()).abs() < 1e-15);
        assert!((e.omega[1] - 0.7f64.sin()).abs() < 1e-15);
        assert!((e.metric_diag[0] - 1.0).abs() < 1e-15);
        assert!((e.jacobian[0] + 0.7f64.sin()).abs() < 1e-15);
        assert!((e.jacobian[1] - 0.7f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn chart_point_is_unit_and_jacobian_matches_metric() {
        for m in 1..=5usize {
            let theta: Vec<f64> = (0..m)
                .map(|a| 0.4 + 0.37 * (a as f64) + 0.1 * ((a * a) as f64))
                .collect();
            let e = sphere_chart(&theta);
            assert!((dot(&e.omega, &e.omega) - 1.0).abs() < 1e-13, "m={m}");

            // J^T J must equal diag(f_a) and columns must be orthogonal.
            for a in 0..m {
                let ca = &e.jacobian[a * (m + 1)..(a + 1) * (m + 1)];
                for b in 0..m {
                    let cb = &e.jacobian[b * (m + 1)..(b + 1) * (m + 1)];
                    let expect = if a == b { e.metric_diag[a] } else { 0.0 };
                    assert!(
                        (dot(ca, cb) - expect).abs() < 1e-12,
                        "m={m} a={a} b={b} got {} want {}",
                        dot(ca, cb),
                        expect
                    );
                }
                // tangent vectors are tangent to the sphere
                assert!(dot(ca, &e.omega).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = 4;
        let theta = [0.9, 1.3, 0.6, 2.1];
        let h = 1e-6;
        let e = sphere_chart(&theta);
        for a in 0..m {
            let mut tp = theta;
            let mut tm = theta;
            tp[a] += h;
            tm[a] -= h;
            let ep = sphere_chart(&tp);
            let em = sphere_chart(&tm);
            for i in 0..=m {
                let fd = (ep.omega[i] - em.omega[i]) / (2.0 * h);
                let an = e.jacobian[a * (m + 1) + i];
                assert!((fd - an).abs() < 1e-9, "a={a} i={i} fd={fd} an={an}");
            }
        }
    }

    #[test]
    fn christoffels_match_metric_differences() {
        // Γ^c_{ab} = ½ g^{cc} (∂_a g_{bc} + ∂_b g_{ac} − ∂_c g_{ab}) for the
        // diagonal metric, reconstructed here by finite differences.
        let m = 4;
        let theta = [0.8, 1.1, 2.0, 0.5];
        let h = 1e-6;
        let gamma = sphere_christoffels(&theta);
        let g0 = sphere_chart(&theta).metric_diag;

        let dg = |a: usize| -> Vec<f64> {
            let mut tp = theta;
            let mut tm = theta;
            tp[a] += h;
            tm[a] -= h;
            let gp = sphere_chart(&tp).metric_diag;
            let gm = sphere_chart(&tm).metric_diag;
            (0..m).map(|i| (gp[i] - gm[i]) / (2.0 * h)).collect()
        };
        let grads: Vec<Vec<f64>> = (0..m).map(dg).collect();

        for c in 0..m {
            for a in 0..m {
                for b in 0..m {
                    // diagonal metric: g_{bc} nonzero only when b == c
                    let t1 = if b == c { grads[a][c] } else { 0.0 };
                    let t2 = if a == c { grads[b][c] } else { 0.0 };
                    let t3 = if a == b { grads[c][a] } else { 0.0 };
                    let expect = 0.5 / g0[c] * (t1 + t2 - t3);
                    let got = gamma[c][a * m + b];
                    assert!(
                        (got - expect).abs() < 1e-7,
                        "Γ^{c}_{a}{b}: got {got} want {expect}"
                    );
                }
            }
        }
    }
}
