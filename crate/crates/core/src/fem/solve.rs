//! Generalized symmetric eigensolver for the discrete stability pencil
//! (K − V)x = μ·M·x.
//!
//! Small pencils go through a dense reduction: M = L·Lᵀ, then a
//! symmetric eigendecomposition of L⁻¹(K−V)L⁻ᵀ. Large pencils use
//! shift-and-invert block subspace iteration with the shift
//! σ = −(max potential) − 1, which makes B = K − V − σM positive
//! definite, so B factors by a banded Cholesky after reordering the
//! periodic grid. The reordering folds each grid direction outward from
//! its start (0, 2, 4, …, 5, 3, 1 in folded positions), which turns the
//! periodic wrap-around couplings into near-diagonal couplings and
//! bounds the half bandwidth by 2·m₂+2.
//!
//! The iteration carries a block of count+8 vectors so that exact
//! discrete multiplicities (cos/sin pairs on the translation-invariant
//! mesh) converge together, M-orthonormalizes with two modified
//! Gram–Schmidt passes, and extracts Ritz pairs every step. Convergence
//! is declared when every wanted pair satisfies
//! ‖(K−V)x − μMx‖₂ ≤ 10⁻⁸ with x normalized in M. Everything is seeded
//! and sequential, so repeated runs are bit-for-bit identical.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::assemble::StabilityPencil;
use super::sparse::CsrMatrix;

/// Default zero-mode tolerance for discrete eigenvalues. Discretization
/// shifts continuum zeros upward by O(h²), so the window is much wider
/// than for exact mode enumeration.
pub const FEM_ZERO_TOL: f64 = 0.05;

/// Residual target for iterative eigenpairs.
const RESIDUAL_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200;
/// Auto method switches to shift-and-invert above this dimension.
const DENSE_AUTO_LIMIT: usize = 600;
/// Hard cap for the dense path.
const DENSE_HARD_LIMIT: usize = 2048;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveMethod {
    Auto,
    Dense,
    ShiftInvert,
}

/// Sorted lowest eigenpairs of the pencil.
#[derive(Clone, Debug)]
pub struct PencilSpectrum {
    /// Ascending eigenvalues μ₁ ≤ … ≤ μ_count.
    pub eigenvalues: Vec<f64>,
    /// M-orthonormal eigenvectors, one column per eigenvalue.
    pub vectors: DMatrix<f64>,
    /// ‖(K−V)x − μMx‖₂ per pair.
    pub residuals: Vec<f64>,
    /// Method that actually ran (never Auto).
    pub method: SolveMethod,
}

/// Lowest `count` eigenpairs of (K − V, M).
pub fn eigen_solve(
    pencil: &StabilityPencil,
    count: usize,
    method: SolveMethod,
) -> Result<PencilSpectrum> {
    let dim = pencil.dim();
    if count == 0 || count > dim {
        return Err(Error::Parameter(format!(
            "eigenpair count must lie in [1, {dim}], got {count}"
        )));
    }
    let resolved = match method {
        SolveMethod::Auto => {
            if dim <= DENSE_AUTO_LIMIT {
                SolveMethod::Dense
            } else {
                SolveMethod::ShiftInvert
            }
        }
        m => m,
    };
    match resolved {
        SolveMethod::Dense => solve_dense(pencil, count),
        SolveMethod::ShiftInvert => solve_shift_invert(pencil, count),
        SolveMethod::Auto => unreachable!(),
    }
}

/// (strong, zero) mode counts from a solved spectrum. The last computed
/// eigenvalue must clear the zero window, otherwise negative or zero
/// modes could hide beyond the computed block.
pub fn negative_count(spectrum: &PencilSpectrum, zero_tol: f64) -> Result<(u64, u64)> {
    check_zero_tol(zero_tol)?;
    let last = *spectrum
        .eigenvalues
        .last()
        .expect("spectrum holds at least one eigenvalue");
    if last <= zero_tol {
        return Err(Error::IncompleteEnumeration(format!(
            "largest computed eigenvalue {last:.6} does not clear the zero tolerance {zero_tol}; \
             request more eigenpairs"
        )));
    }
    let strong = spectrum
        .eigenvalues
        .iter()
        .filter(|&&mu| mu < -zero_tol)
        .count() as u64;
    let zero = spectrum
        .eigenvalues
        .iter()
        .filter(|&&mu| mu.abs() <= zero_tol)
        .count() as u64;
    Ok((strong, zero))
}

/// Negative modes of the pencil restricted to discretely mean-zero
/// vectors (1ᵀMx = 0). The restriction is evaluated honestly: negative
/// eigenvectors are projected, their span is compressed through the
/// projected Gram pair, and the reduced pencil is recounted.
pub fn weak_negative_count(
    pencil: &StabilityPencil,
    spectrum: &PencilSpectrum,
    zero_tol: f64,
) -> Result<u64> {
    check_zero_tol(zero_tol)?;
    let dim = pencil.dim();
    let negatives: Vec<usize> = (0..spectrum.eigenvalues.len())
        .filter(|&i| spectrum.eigenvalues[i] < -zero_tol)
        .collect();
    if negatives.is_empty() {
        return Ok(0);
    }

    let ones = vec![1.0; dim];
    let mut m_ones = vec![0.0; dim];
    pencil.m.matvec(&ones, &mut m_ones);
    let mass: f64 = m_ones.iter().sum();

    let c = negatives.len();
    let mut y = DMatrix::zeros(dim, c);
    for (col, &i) in negatives.iter().enumerate() {
        let x = spectrum.vectors.column(i);
        let weight: f64 = x.iter().zip(&m_ones).map(|(a, b)| a * b).sum();
        let shift = weight / mass;
        for row in 0..dim {
            y[(row, col)] = x[row] - shift;
        }
    }

    // projected Gram pair over the mean-zero span
    let mut ay = DMatrix::zeros(c, c);
    let mut my = DMatrix::zeros(c, c);
    let mut scratch = vec![0.0; dim];
    let mut scratch2 = vec![0.0; dim];
    for j in 0..c {
        let col: Vec<f64> = y.column(j).iter().copied().collect();
        pencil.k.matvec(&col, &mut scratch);
        pencil.v.matvec(&col, &mut scratch2);
        for (a, b) in scratch.iter_mut().zip(&scratch2) {
            *a -= b;
        }
        for i in 0..c {
            ay[(i, j)] = y.column(i).iter().zip(&scratch).map(|(a, b)| a * b).sum();
        }
        pencil.m.matvec(&col, &mut scratch);
        for i in 0..c {
            my[(i, j)] = y.column(i).iter().zip(&scratch).map(|(a, b)| a * b).sum();
        }
    }
    ay = (&ay + ay.transpose()) * 0.5;
    my = (&my + my.transpose()) * 0.5;

    // drop the null directions introduced by the projection
    let gram = SymmetricEigen::new(my);
    let max_eig = gram.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let kept: Vec<usize> = (0..c)
        .filter(|&i| gram.eigenvalues[i] > 1e-10 * max_eig.max(1e-300))
        .collect();
    if kept.is_empty() {
        return Ok(0);
    }
    let mut t = DMatrix::zeros(c, kept.len());
    for (col, &i) in kept.iter().enumerate() {
        let scale = gram.eigenvalues[i].sqrt().recip();
        for row in 0..c {
            t[(row, col)] = gram.eigenvectors[(row, i)] * scale;
        }
    }
    let reduced = t.transpose() * ay * &t;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eigs = SymmetricEigen::new(reduced).eigenvalues;
    Ok(eigs.iter().filter(|&&mu| mu < -zero_tol).count() as u64)
}

/// Complete index counts with automatic block enlargement: solve with a
/// starting block, and double it (up to three times) until the spectrum
/// sees past the zero window.
pub fn fem_index_counts(
    pencil: &StabilityPencil,
    hint: usize,
    zero_tol: f64,
    method: SolveMethod,
) -> Result<(PencilSpectrum, crate::closed_spectrum::IndexCount)> {
    check_zero_tol(zero_tol)?;
    let dim = pencil.dim();
    let mut count = hint.clamp(3, dim);
    let mut last_err = None;
    for _ in 0..4 {
        let spectrum = eigen_solve(pencil, count, method)?;
        match negative_count(&spectrum, zero_tol) {
            Ok((strong, zero)) => {
                let weak = weak_negative_count(pencil, &spectrum, zero_tol)?;
                return Ok((
                    spectrum,
                    crate::closed_spectrum::IndexCount {
                        strong,
                        weak,
                        zero_modes: zero,
                    },
                ));
            }
            Err(e) => {
                last_err = Some(e);
                if count == dim {
                    break;
                }
                count = (count * 2).min(dim);
            }
        }
    }
    Err(last_err.expect("at least one counting attempt ran"))
}

fn check_zero_tol(zero_tol: f64) -> Result<()> {
    if !(zero_tol >= 0.0) || !zero_tol.is_finite() {
        return Err(Error::Parameter(format!(
            "zero tolerance must be finite and nonnegative, got {zero_tol}"
        )));
    }
    Ok(())
}

fn apply_a(pencil: &StabilityPencil, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
    pencil.k.matvec(x, out);
    pencil.v.matvec(x, scratch);
    for (o, s) in out.iter_mut().zip(scratch.iter()) {
        *o -= s;
    }
}

fn residual_norms(
    pencil: &StabilityPencil,
    eigenvalues: &[f64],
    vectors: &DMatrix<f64>,
    count: usize,
) -> Vec<f64> {
    let dim = pencil.dim();
    let mut ax = vec![0.0; dim];
    let mut mx = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let mut x = vec![0.0; dim];
    (0..count)
        .map(|i| {
            x.copy_from_slice(vectors.column(i).as_slice());
            apply_a(pencil, &x, &mut ax, &mut scratch);
            pencil.m.matvec(&x, &mut mx);
            ax.iter()
                .zip(&mx)
                .map(|(a, m)| {
                    let r = a - eigenvalues[i] * m;
                    r * r
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

fn solve_dense(pencil: &StabilityPencil, count: usize) -> Result<PencilSpectrum> {
    let dim = pencil.dim();
    if dim > DENSE_HARD_LIMIT {
        return Err(Error::Parameter(format!(
            "dense eigensolver is capped at dimension {DENSE_HARD_LIMIT}, pencil has {dim}; \
             use the shift-and-invert method"
        )));
    }
    let mut a = DMatrix::zeros(dim, dim);
    let mut m = DMatrix::zeros(dim, dim);
    for (i, j, v) in pencil.k.entries() {
        a[(i, j)] += v;
    }
    for (i, j, v) in pencil.v.entries() {
        a[(i, j)] -= v;
    }
    for (i, j, v) in pencil.m.entries() {
        m[(i, j)] += v;
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::InvariantViolation("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹·A·L⁻ᵀ through two triangular solves
    let t = l.solve_lower_triangular(&a).ok_or_else(singular_mass)?;
    let c = l
        .solve_lower_triangular(&t.transpose())
        .ok_or_else(singular_mass)?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].partial_cmp(&eig.eigenvalues[y]).unwrap());

    let eigenvalues: Vec<f64> = order[..count].iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut y = DMatrix::zeros(dim, count);
    for (col, &i) in order[..count].iter().enumerate() {
        y.set_column(col, &eig.eigenvectors.column(i));
    }
    // x = L⁻ᵀ·y keeps M-orthonormality
    let vectors = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(singular_mass)?;
    let residuals = residual_norms(pencil, &eigenvalues, &vectors, count);
    Ok(PencilSpectrum {
        eigenvalues,
        vectors,
        residuals,
        method: SolveMethod::Dense,
    })
}

fn singular_mass() -> Error {
    Error::InvariantViolation("mass matrix is not positive definite".into())
}

/// Folded position of index i on a periodic run of length m: even slots
/// count up from the start, odd slots count down from the end, so
/// periodic neighbors sit at folded distance ≤ 2.
fn fold_positions(m: usize) -> Vec<usize> {
    (0..m)
        .map(|i| {
            if 2 * i <= m - 1 {
                2 * i
            } else {
                2 * (m - 1 - i) + 1
            }
        })
        .collect()
}

/// Lower-band storage of a symmetric positive definite matrix.
struct BandMatrix {
    n: usize,
    bw: usize,
    /// data[i·(bw+1) + (bw − i + j)] = B[i][j] for i−bw ≤ j ≤ i.
    data: Vec<f64>,
}

impl BandMatrix {
    fn new(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (self.bw + j - i)
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.idx(i, j);
        self.data[s] = v;
    }

    /// In-place Cholesky B = L·Lᵀ; Err on a non-positive pivot.
    fn factor(&mut self) -> std::result::Result<(), ()> {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let slot = self.idx(i, j);
                let mut sum = self.data[slot];
                let t0 = lo.max(j.saturating_sub(self.bw));
                for t in t0..j {
                    sum -= self.data[self.idx(i, t)] * self.data[self.idx(j, t)];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(());
                    }
                    self.data[slot] = sum.sqrt();
                } else {
                    let pivot = self.data[self.idx(j, j)];
                    self.data[slot] = sum / pivot;
                }
            }
        }
        Ok(())
    }

    /// Solve L·Lᵀ·x = b in place.
    fn solve(&self, b: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut sum = b[i];
            for t in lo..i {
                sum -= self.data[self.idx(i, t)] * b[t];
            }
            b[i] = sum / self.data[self.idx(i, i)];
        }
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            let mut sum = b[i];
            for t in i + 1..=hi {
                sum -= self.data[self.idx(t, i)] * b[t];
            }
            b[i] = sum / self.data[self.idx(i, i)];
        }
    }
}

/// Band of B = K − V − σM under the folded permutation.
fn build_band(pencil: &StabilityPencil, sigma: f64, perm: &[usize]) -> BandMatrix {
    let mut bw = 0usize;
    for (i, j, _) in pencil.k.entries() {
        let (pi, pj) = (perm[i], perm[j]);
        bw = bw.max(pi.abs_diff(pj));
    }
    let mut band = BandMatrix::new(pencil.dim(), bw);
    for (((i, j, kv), (_, _, vv)), (_, _, mv)) in pencil
        .k
        .entries()
        .zip(pencil.v.entries())
        .zip(pencil.m.entries())
    {
        let (pi, pj) = (perm[i], perm[j]);
        if pi >= pj {
            band.set(pi, pj, kv - vv - sigma * mv);
        }
    }
    band
}

/// Two-pass modified Gram-Schmidt in the M inner product; returns the
/// cached products M·xᵢ for the orthonormalized columns.
fn m_orthonormalize(m: &CsrMatrix, x: &mut DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (dim, s) = (x.nrows(), x.ncols());
    let mut my = DMatrix::zeros(dim, s);
    let mut v = vec![0.0; dim];
    let mut mv = vec![0.0; dim];
    for i in 0..s {
        v.copy_from_slice(x.column(i).as_slice());
        for _pass in 0..2 {
            for j in 0..i {
                let c: f64 = my.column(j).iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vk, yk) in v.iter_mut().zip(x.column(j).iter()) {
                    *vk -= c * yk;
                }
            }
        }
        m.matvec(&v, &mut mv);
        let norm_sq: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        if !(norm_sq > 1e-24) {
            return Err(Error::Convergence {
                best_residual: f64::INFINITY,
                iterations: 0,
            });
        }
        let inv = norm_sq.sqrt().recip();
        for (xk, yk) in x.column_mut(i).iter_mut().zip(&v) {
            *xk = yk * inv;
        }
        for (dst, mk) in my.column_mut(i).iter_mut().zip(&mv) {
            *dst = mk * inv;
        }
    }
    Ok(my)
}

fn solve_shift_invert(pencil: &StabilityPencil, count: usize) -> Result<PencilSpectrum> {
    let dim = pencil.dim();
    let mesh = &pencil.mesh;
    let fold1 = fold_positions(mesh.m1);
    let fold2 = fold_positions(mesh.m2);
    let perm: Vec<usize> = (0..dim)
        .map(|id| fold1[id / mesh.m2] * mesh.m2 + fold2[id % mesh.m2])
        .collect();

    // place the shift below the whole spectrum so B is positive definite
    let mut sigma = -pencil.max_potential - 1.0;
    let mut band = None;
    for _ in 0..3 {
        let mut candidate = build_band(pencil, sigma, &perm);
        if candidate.factor().is_ok() {
            band = Some(candidate);
            break;
        }
        sigma = 2.0 * sigma - 1.0;
    }
    let band = band.ok_or(Error::Convergence {
        best_residual: f64::INFINITY,
        iterations: 0,
    })?;

    let s = (count + 8).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(0xFE11);
    let mut x = DMatrix::from_fn(dim, s, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    m_orthonormalize(&pencil.m, &mut x)?;

    let mut mx = vec![0.0; dim];
    let mut permuted = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    let mut z = DMatrix::zeros(dim, s);
    let mut best_residual = f64::INFINITY;

    for iteration in 1..=MAX_ITERATIONS {
        // z = B⁻¹·M·x, column by column through the banded factor
        for c in 0..s {
            col.copy_from_slice(x.column(c).as_slice());
            pencil.m.matvec(&col, &mut mx);
            for i in 0..dim {
                permuted[perm[i]] = mx[i];
            }
            band.solve(&mut permuted);
            for i in 0..dim {
                z[(i, c)] = permuted[perm[i]];
            }
        }
        m_orthonormalize(&pencil.m, &mut z)?;

        // Rayleigh-Ritz on the block
        let mut ar = DMatrix::zeros(s, s);
        for c in 0..s {
            col.copy_from_slice(z.column(c).as_slice());
            apply_a(pencil, &col, &mut mx, &mut scratch);
            for r in 0..s {
                ar[(r, c)] = z.column(r).iter().zip(&mx).map(|(a, b)| a * b).sum();
            }
        }
        let ar = (&ar + ar.transpose()) * 0.5;
        let eig = SymmetricEigen::new(ar);
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut rot = DMatrix::zeros(s, s);
        for (cnew, &cold) in order.iter().enumerate() {
            rot.set_column(cnew, &eig.eigenvectors.column(cold));
        }
        x = &z * rot;
        let mu: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

        let residuals = residual_norms(pencil, &mu, &x, count);
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        best_residual = best_residual.min(worst);
        if worst <= RESIDUAL_TOL {
            let eigenvalues = mu[..count].to_vec();
            let vectors = x.columns(0, count).into_owned();
            return Ok(PencilSpectrum {
                eigenvalues,
                vectors,
                residuals,
                method: SolveMethod::ShiftInvert,
            });
        }
        let _ = iteration;
    }
    Err(Error::Convergence {
        best_residual,
        iterations: MAX_ITERATIONS,
    })
}
