//! Row-oriented sparse matrix and index/value sparse vector storage.
//!
//! Exact zeros are never stored: any arithmetic that produces a value of
//! exactly 0.0 drops the entry. `l0` therefore always equals the number of
//! stored entries, which the censored sampling distribution depends on.

use crate::{Error, Result};

/// Sparse vector over a fixed dimension. Entries are sorted by index and
/// never hold an explicit zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

/// The four norms tracked by termination rules and trace records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l0: usize,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector { dim, entries: Vec::new() }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        Ok(SparseVector { dim, entries: vec![(i, 1.0)] })
    }

    /// Build from arbitrary (index, value) pairs; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_pairs(dim: usize, pairs: &[(usize, f64)]) -> Result<Self> {
        let mut v = SparseVector::zeros(dim);
        for &(i, val) in pairs {
            v.add(i, val)?;
        }
        Ok(v)
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        SparseVector { dim: values.len(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Set coordinate `i` to `value`, dropping the entry when the value is
    /// exactly zero.
    pub fn set(&mut self, i: usize, value: f64) -> Result<()> {
        if i >= self.dim {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim });
        }
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => {
                if value == 0.0 {
                    self.entries.remove(pos);
                } else {
                    self.entries[pos].1 = value;
                }
            }
            Err(pos) => {
                if value != 0.0 {
                    self.entries.insert(pos, (i, value));
                }
            }
        }
        Ok(())
    }

    /// Add `delta` to coordinate `i`, pruning an exact-zero result.
    pub fn add(&mut self, i: usize, delta: f64) -> Result<()> {
        if i >= self.dim {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim });
        }
        if delta == 0.0 {
            return Ok(());
        }
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => {
                let v = self.entries[pos].1 + delta;
                if v == 0.0 {
                    self.entries.remove(pos);
                } else {
                    self.entries[pos].1 = v;
                }
            }
            Err(pos) => self.entries.insert(pos, (i, delta)),
        }
        Ok(())
    }

    pub fn norms(&self) -> Norms {
        let mut l1 = 0.0;
        let mut sq = 0.0;
        let mut linf = 0.0f64;
        for &(_, v) in &self.entries {
            let a = v.abs();
            l1 += a;
            sq += v * v;
            linf = linf.max(a);
        }
        Norms { l0: self.entries.len(), l1, l2: sq.sqrt(), linf }
    }

    /// Dot product against a dense vector of matching dimension.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Immutable row-oriented sparse square matrix. Row `u` stores exactly the
/// out-neighbors `N_u` of `u` in the graph of the matrix. The maximum row
/// nnz `d` is cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
    max_row_nnz: usize,
}

/// Result of [`SparseMatrix::operator_norm_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SparseMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed, exact
    /// zeros dropped.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(r, c, v) in triplets {
            if r >= n {
                return Err(Error::IndexOutOfRange { index: r, dim: n });
            }
            if c >= n {
                return Err(Error::IndexOutOfRange { index: c, dim: n });
            }
            rows[r].push((c, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *row = merged;
        }
        let max_row_nnz = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        Ok(SparseMatrix { n, rows, max_row_nnz })
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        let n = dense.len();
        let mut triplets = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        SparseMatrix::from_triplets(n, &triplets)
    }

    pub fn zeros(n: usize) -> Self {
        SparseMatrix { n, rows: vec![Vec::new(); n], max_row_nnz: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cached maximum row nnz, the `d` in the convergence bounds.
    pub fn max_row_nnz(&self) -> usize {
        self.max_row_nnz
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, u: usize) -> &[(usize, f64)] {
        &self.rows[u]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(pos) => self.rows[r][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Computes `Mᵀv` as `Σ_u v_u · row_u(M)` scattered into the output,
    /// pruning exact zeros. Also returns the multiplication count
    /// `Σ_{u: v_u≠0} |N_u|` for cost accounting.
    pub fn transpose_apply(&self, v: &SparseVector) -> Result<(SparseVector, u64)> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.dim() });
        }
        let mut acc = vec![0.0; self.n];
        let mut touched = Vec::new();
        let mut mults: u64 = 0;
        for &(u, vu) in v.entries() {
            mults += self.rows[u].len() as u64;
            for &(c, g) in &self.rows[u] {
                if acc[c] == 0.0 {
                    touched.push(c);
                }
                acc[c] += vu * g;
            }
        }
        touched.sort_unstable();
        let entries = touched
            .into_iter()
            .filter(|&c| acc[c] != 0.0)
            .map(|c| (c, acc[c]))
            .collect();
        Ok((SparseVector { dim: self.n, entries }, mults))
    }

    /// Entrywise absolute value; same sparsity pattern.
    pub fn entrywise_abs(&self) -> SparseMatrix {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| (c, v.abs())).collect())
            .collect();
        SparseMatrix { n: self.n, rows, max_row_nnz: self.max_row_nnz }
    }

    /// Power iteration on `MMᵀ` estimating the largest singular value.
    /// The estimate approaches the true value from below; `converged` is set
    /// when the relative change between iterations drops under `tol`.
    pub fn operator_norm_estimate(&self, iters: usize, tol: f64) -> NormEstimate {
        assert!(iters >= 1, "iters must be >= 1");
        if self.n == 0 || self.nnz() == 0 {
            return NormEstimate { value: 0.0, converged: true, iterations: 0 };
        }
        // Deterministic start vector with a mild index-dependent skew to
        // avoid being orthogonal to the leading singular vector.
        let mut x: Vec<f64> = (0..self.n).map(|i| 1.0 + (i as f64 % 7.0) * 0.01).collect();
        normalize(&mut x);
        let mut prev = 0.0;
        for it in 1..=iters {
            // y = Mᵀ x, then x' = M y
            let mut y = vec![0.0; self.n];
            for (u, row) in self.rows.iter().enumerate() {
                for &(c, g) in row {
                    y[c] += g * x[u];
                }
            }
            let mut next: Vec<f64> = self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(c, g)| g * y[c]).sum())
                .collect();
            let lambda = normalize(&mut next);
            x = next;
            let sigma = lambda.sqrt();
            if it > 1 && (sigma - prev).abs() <= tol * sigma.max(f64::MIN_POSITIVE) {
                return NormEstimate { value: sigma, converged: true, iterations: it };
            }
            prev = sigma;
        }
        NormEstimate { value: prev, converged: false, iterations: iters }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[r][c] = v;
            }
        }
        out
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}
