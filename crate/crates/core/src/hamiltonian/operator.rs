//! Real symmetric operators: CSR storage and the matrix-free chain backend share one trait.

use nalgebra::DMatrix;
use rayon::prelude::*;

/// Rows handled per parallel task in a matvec.
const ROW_BLOCK: usize = 4096;

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Upper bound on the spectral norm (maximum absolute row sum).
    fn norm_bound(&self) -> f64;

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            for (i, v) in col.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
        out
    }

    fn expectation(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        dot(x, &y)
    }
}

/// Compressed sparse rows with duplicate entries merged and columns sorted in each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
    pub symmetric: bool,
}

impl SparseOperator {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            rows[r].push((c as u32, v));
        }
        Self::from_rows(dim, rows)
    }

    pub(crate) fn from_rows(dim: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let merged: Vec<Vec<(u32, f64)>> = rows.into_par_iter().map(merge_row).collect();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let nnz = merged.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in merged {
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        let mut op = SparseOperator { dim, row_ptr, cols, values, symmetric: false };
        op.symmetric = op.asymmetry() <= 1e-14;
        op
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().zip(&self.values[span]).map(|(c, v)| (*c as usize, *v))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|r| self.row(r).map(|(c, v)| (v - self.get(c, r)).abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    /// `a A + b B` on the same dimension.
    pub fn combine(&self, a: f64, other: &SparseOperator, b: f64) -> SparseOperator {
        assert_eq!(self.dim, other.dim);
        let rows = (0..self.dim)
            .map(|r| {
                self.row(r)
                    .map(|(c, v)| (c as u32, a * v))
                    .chain(other.row(r).map(|(c, v)| (c as u32, b * v)))
                    .collect()
            })
            .collect();
        SparseOperator::from_rows(self.dim, rows)
    }

    /// Restriction `B^T A B` to the span of the given basis indices (columns of `B` are unit vectors).
    pub fn restrict(&self, indices: &[usize]) -> DMatrix<f64> {
        let pos: std::collections::HashMap<usize, usize> =
            indices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut out = DMatrix::zeros(indices.len(), indices.len());
        for (i, &r) in indices.iter().enumerate() {
            for (c, v) in self.row(r) {
                if let Some(&j) = pos.get(&c) {
                    out[(i, j)] += v;
                }
            }
        }
        out
    }
}

fn merge_row(mut row: Vec<(u32, f64)>) -> Vec<(u32, f64)> {
    row.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, f64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    out
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(ROW_BLOCK).enumerate().for_each(|(block, out)| {
            let start = block * ROW_BLOCK;
            for (k, slot) in out.iter_mut().enumerate() {
                let r = start + k;
                let mut acc = 0.0;
                for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.values[idx] * x[self.cols[idx] as usize];
                }
                *slot = acc;
            }
        });
    }

    fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .reduce(|| 0.0, f64::max)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            out[(r, c)] += v;
        }
        out
    }
}

/// Identity of a given size; handy as a solver sanity check.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }

    fn norm_bound(&self) -> f64 {
        1.0
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, slot) in y.iter_mut().enumerate() {
            *slot = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        (0..self.nrows()).map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    if a.len() >= 1 << 16 {
        a.par_chunks(ROW_BLOCK)
            .zip(b.par_chunks(ROW_BLOCK))
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
            .sum()
    } else {
        a.iter().zip(b).map(|(p, q)| p * q).sum()
    }
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y -= c x`.
pub fn axpy_sub(y: &mut [f64], c: f64, x: &[f64]) {
    if y.len() >= 1 << 16 {
        y.par_chunks_mut(ROW_BLOCK).zip(x.par_chunks(ROW_BLOCK)).for_each(|(a, b)| {
            for (p, q) in a.iter_mut().zip(b) {
                *p -= c * q;
            }
        });
    } else {
        for (p, q) in y.iter_mut().zip(x) {
            *p -= c * q;
        }
    }
}

pub fn scale(y: &mut [f64], c: f64) {
    y.par_iter_mut().for_each(|v| *v *= c);
}
