//! Compressed sparse column matrices and symmetric positive-definite solves.
//!
//! Small systems go through a dense Cholesky factorization. Larger ones are
//! reordered with reverse Cuthill-McKee and factored in envelope (skyline)
//! storage, which keeps all fill inside the profile of the permuted matrix.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems with at least this many unknowns use the sparse envelope solver.
pub const DENSE_LIMIT: usize = 3000;

/// Sparse matrix in compressed sparse column layout.
///
/// Row indices within a column are strictly increasing, which keeps every
/// derived product and traversal deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and entries that cancel to exactly zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|t| (t.1, t.0));

        let mut col_ptr = vec![0; ncols + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let (r, c, _) = sorted[i];
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            let mut v = 0.0;
            while i < sorted.len() && sorted[i].0 == r && sorted[i].1 == c {
                v += sorted[i].2;
                i += 1;
            }
            if v != 0.0 {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
            }
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, &[])
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzero entries `(row, value)` of column `j`.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[range.clone()].binary_search(&i) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.ncols)
            .flat_map(|j| self.col(j).map(move |(i, v)| (i, j, v)))
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (i, v) in self.col(j) {
                y[i] += v * xj;
            }
        }
        y
    }

    /// Computes `self^T x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        (0..self.ncols)
            .map(|j| self.col(j).map(|(i, v)| v * x[i]).sum())
            .collect()
    }

    pub fn transpose(&self) -> CscMatrix {
        let t: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        CscMatrix::from_triplets(self.ncols, self.nrows, &t)
    }

    /// Sparse product `self * rhs`.
    pub fn mul(&self, rhs: &CscMatrix) -> CscMatrix {
        assert_eq!(self.ncols, rhs.nrows);
        let mut triplets = Vec::new();
        for j in 0..rhs.ncols {
            for (k, b) in rhs.col(j) {
                for (i, a) in self.col(k) {
                    triplets.push((i, j, a * b));
                }
            }
        }
        CscMatrix::from_triplets(self.nrows, rhs.ncols, &triplets)
    }

    /// Gram matrix `self^T self`.
    pub fn gram(&self) -> CscMatrix {
        self.transpose().mul(self)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Factorization of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub enum SpdFactor {
    Dense(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Envelope(EnvelopeCholesky),
}

impl SpdFactor {
    /// Factors `matrix`, choosing the dense path below [`DENSE_LIMIT`] unknowns.
    pub fn new(matrix: &CscMatrix) -> Result<Self> {
        if matrix.nrows() < DENSE_LIMIT {
            Self::dense(matrix)
        } else {
            EnvelopeCholesky::new(matrix).map(SpdFactor::Envelope)
        }
    }

    pub fn dense(matrix: &CscMatrix) -> Result<Self> {
        let dense = matrix.to_dense();
        let condition = diagonal_condition(matrix);
        dense
            .cholesky()
            .map(SpdFactor::Dense)
            .ok_or(Error::SingularSystem { condition })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            SpdFactor::Dense(chol) => chol.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec(),
            SpdFactor::Envelope(env) => env.solve(rhs),
        }
    }
}

/// Ratio of the largest to smallest diagonal entry; a cheap stand-in for a
/// condition estimate in diagnostics.
fn diagonal_condition(matrix: &CscMatrix) -> f64 {
    let n = matrix.nrows().min(matrix.ncols());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for i in 0..n {
        let d = matrix.get(i, i).abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solves `matrix * x = rhs` for symmetric positive-definite `matrix`.
pub fn solve_spd(matrix: &CscMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    Ok(SpdFactor::new(matrix)?.solve(rhs))
}

/// Row-oriented envelope Cholesky factor `P A P^T = L L^T`.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn new(matrix: &CscMatrix) -> Result<Self> {
        let n = matrix.nrows();
        assert_eq!(n, matrix.ncols());
        let perm = reverse_cuthill_mckee(matrix);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        // Profile of the permuted lower triangle.
        let mut first: Vec<usize> = (0..n).collect();
        for j in 0..n {
            for (i, _) in matrix.col(j) {
                let (pi, pj) = (inv[i], inv[j]);
                let (row, col) = if pi >= pj { (pi, pj) } else { (pj, pi) };
                first[row] = first[row].min(col);
            }
        }
        let mut offset = vec![0; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; offset[n]];
        for j in 0..n {
            for (i, v) in matrix.col(j) {
                let (pi, pj) = (inv[i], inv[j]);
                if pi >= pj {
                    data[offset[pi] + pj - first[pi]] = v;
                }
            }
        }

        let condition = diagonal_condition(matrix);
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let mut s = data[offset[i] + j - fi];
                for k in start..j {
                    s -= data[offset[i] + k - fi] * data[offset[j] + k - fj];
                }
                data[offset[i] + j - fi] = s / data[offset[j] + j - fj];
            }
            let mut d = data[offset[i] + i - fi];
            for k in fi..i {
                let l = data[offset[i] + k - fi];
                d -= l * l;
            }
            if !(d > 0.0) {
                return Err(Error::SingularSystem { condition });
            }
            data[offset[i] + i - fi] = d.sqrt();
        }
        Ok(Self {
            perm,
            first,
            offset,
            data,
        })
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[self.offset[i] + j - self.first[i]]
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut z: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        for i in 0..n {
            let mut s = z[i];
            for k in self.first[i]..i {
                s -= self.entry(i, k) * z[k];
            }
            z[i] = s / self.entry(i, i);
        }
        for i in (0..n).rev() {
            z[i] /= self.entry(i, i);
            let zi = z[i];
            for k in self.first[i]..i {
                z[k] -= self.entry(i, k) * zi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = z[new];
        }
        x
    }

    /// Number of stored entries in the factor.
    pub fn profile_size(&self) -> usize {
        self.data.len()
    }
}

/// Reverse Cuthill-McKee ordering of the symmetric sparsity pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(matrix: &CscMatrix) -> Vec<usize> {
    let n = matrix.ncols();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|j| matrix.col(j).map(|(i, _)| i).filter(|&i| i != j).collect())
        .collect();
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adjacency[v].iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_by_key(|&u| (degree[u], u));
            nbrs.dedup();
            for u in nbrs {
                if !visited[u] {
                    visited[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order.reverse();
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CscMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + 1e-3));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CscMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn product_and_transpose_match_dense() {
        let a = CscMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (2, 0, -2.0), (1, 1, 3.0)]);
        let b = CscMatrix::from_triplets(2, 2, &[(0, 1, 4.0), (1, 0, 5.0)]);
        assert_eq!(a.mul(&b).to_dense(), a.to_dense() * b.to_dense());
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
        assert_eq!(a.gram().to_dense(), a.to_dense().transpose() * a.to_dense());
        assert_eq!(a.tr_mul_vec(&[1.0, 2.0, 3.0]), vec![-5.0, 6.0]);
    }

    #[test]
    fn envelope_matches_dense_solve() {
        let a = laplacian_1d(40);
        let rhs: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let dense = SpdFactor::dense(&a).unwrap().solve(&rhs);
        let env = EnvelopeCholesky::new(&a).unwrap().solve(&rhs);
        for (x, y) in dense.iter().zip(&env) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(matches!(SpdFactor::dense(&a), Err(Error::SingularSystem { .. })));
        assert!(matches!(EnvelopeCholesky::new(&a), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian_1d(17);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }
}
