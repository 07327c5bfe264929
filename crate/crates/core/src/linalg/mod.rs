//! Dense vector/matrix primitives, data standardization, and symmetric
//! eigendecomposition.
//!
//! Matrices are stored column-major so that predictor columns are contiguous
//! slices; coordinate-descent inner loops and Gram products run over `col(j)`
//! without striding.

mod dataset;
mod eigen;

pub use dataset::{standardize, Dataset};
pub use eigen::{sym_eigen, EigenDecomposition};

use crate::error::{Error, Result};

/// Dense column-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row slices (every row must have the same length).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::BadDimensions("matrix needs at least one row".into()));
        }
        let n_cols = rows[0].len();
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::BadDimensions("ragged rows".into()));
        }
        let mut m = Matrix::zeros(rows.len(), n_cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Builds a matrix by adopting column vectors (all of equal length).
    pub fn from_cols(cols: Vec<Vec<f64>>) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::BadDimensions(
                "matrix needs at least one column".into(),
            ));
        }
        let n_rows = cols[0].len();
        if cols.iter().any(|c| c.len() != n_rows) {
            return Err(Error::BadDimensions("ragged columns".into()));
        }
        let n_cols = cols.len();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for c in cols {
            data.extend_from_slice(&c);
        }
        Ok(Matrix {
            n_rows,
            n_cols,
            data,
        })
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        self.data[j * self.n_rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        self.data[j * self.n_rows + i] = v;
    }

    /// Contiguous view of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n_cols).map(|j| self.get(i, j)).collect()
    }

    /// New matrix keeping only the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.n_rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            m.col_mut(jj).copy_from_slice(self.col(j));
        }
        m
    }

    /// New matrix keeping only the listed rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len(), self.n_cols);
        for j in 0..self.n_cols {
            let src = self.col(j);
            let dst = m.col_mut(j);
            for (ii, &i) in idx.iter().enumerate() {
                dst[ii] = src[i];
            }
        }
        m
    }

    /// Gram matrix XᵀX.
    pub fn gram(&self) -> Matrix {
        let p = self.n_cols;
        let mut g = Matrix::zeros(p, p);
        for j in 0..p {
            let cj = self.col(j);
            for k in j..p {
                let v = dot(cj, self.col(k));
                g.set(j, k, v);
                g.set(k, j, v);
            }
        }
        g
    }

    /// X · v (accumulated column-wise; skips zero coefficients).
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n_cols);
        let mut out = vec![0.0; self.n_rows];
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                axpy(vj, self.col(j), &mut out);
            }
        }
        out
    }

    /// Xᵀ · v.
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n_rows);
        (0..self.n_cols).map(|j| dot(self.col(j), v)).collect()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise max absolute difference against another matrix of equal shape.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        debug_assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y += alpha * x
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

#[inline]
pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves A x = b for symmetric positive-definite A by Cholesky factorization.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n_rows();
    if a.n_cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky_solve: a is {}x{}, b has length {}",
            a.n_rows(),
            a.n_cols(),
            b.len()
        )));
    }
    // lower factor L, column by column
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a.get(j, j);
        for k in 0..j {
            let ljk = l.get(j, k);
            diag -= ljk * ljk;
        }
        if diag <= 0.0 {
            return Err(Error::SingularGram(diag));
        }
        let diag = diag.sqrt();
        l.set(j, j, diag);
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / diag);
        }
    }
    // forward then backward substitution
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l.get(i, k) * x[k];
        }
        x[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l.get(k, i) * x[k];
        }
        x[i] /= l.get(i, i);
    }
    Ok(x)
}
