//! Minimal CSR matrices for the element assembly, with deterministic
//! two-phase construction: the symbolic pattern is built and sorted
//! first, then numeric assembly adds into existing slots by binary
//! search. Stiffness, mass and potential matrices share one pattern, so
//! structural symmetry is exact by construction.

use std::io::{self, Write};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Symbolic-phase collector of matrix positions.
pub struct CsrBuilder {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl CsrBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            pairs: Vec::new(),
        }
    }

    /// Declare that (i, j) and (j, i) may hold a value.
    pub fn insert_pair(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.n && j < self.n);
        self.pairs.push((i, j));
        if i != j {
            self.pairs.push((j, i));
        }
    }

    pub fn finalize(mut self) -> CsrMatrix {
        self.pairs.sort_unstable();
        self.pairs.dedup();
        let mut row_ptr = vec![0usize; self.n + 1];
        for &(i, _) in &self.pairs {
            row_ptr[i + 1] += 1;
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = self.pairs.iter().map(|&(_, j)| j).collect::<Vec<_>>();
        let values = vec![0.0; col_idx.len()];
        CsrMatrix {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Zeroed copy with the same pattern.
    pub fn same_pattern(&self) -> CsrMatrix {
        CsrMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: vec![0.0; self.col_idx.len()],
        }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|p| self.row_ptr[i] + p)
    }

    /// Add into an existing slot; the pattern must contain (i, j).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let slot = self
            .slot(i, j)
            .expect("numeric assembly hit a position outside the symbolic pattern");
        self.values[slot] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.values[s])
    }

    /// y = A·x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for s in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[s] * x[self.col_idx[s]];
            }
            y[i] = acc;
        }
    }

    /// xᵀ·A·y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for s in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.values[s] * y[self.col_idx[s]];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// Entries (i, j, value) in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |s| (i, self.col_idx[s], self.values[s]))
        })
    }

    /// Largest |A[i][j] − A[j][i]|, for symmetry checks.
    pub fn symmetry_defect(&self) -> f64 {
        self.entries()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Write the lower triangle in coordinate form: a "rows cols nnz"
    /// header, then 0-based "i j value" lines with 17 significant digits.
    pub fn write_lower_triples(&self, w: &mut impl Write) -> io::Result<()> {
        let lower = self.entries().filter(|&(i, j, _)| i >= j).count();
        writeln!(w, "{} {} {}", self.n, self.n, lower)?;
        for (i, j, v) in self.entries().filter(|&(i, j, _)| i >= j) {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }
}
