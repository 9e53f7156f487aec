//! Small dense matrices for linear forward operators and the normal-equation
//! solves behind the closed-form Tikhonov path. Desk-scale only; no attempt
//! at blocking or pivoting beyond what symmetric positive definite systems
//! need.

use alloc::vec::Vec;
use core::fmt;

use crate::point::Point;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixError {
    EmptyOrRagged,
    NonFinite,
    NotPositiveDefinite,
    DimensionMismatch,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::EmptyOrRagged => write!(f, "matrix rows must be nonempty and of equal length"),
            MatrixError::NonFinite => write!(f, "matrix entries must be finite"),
            MatrixError::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            MatrixError::DimensionMismatch => write!(f, "matrix/vector dimensions do not match"),
        }
    }
}

impl core::error::Error for MatrixError {}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(MatrixError::EmptyOrRagged);
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::EmptyOrRagged);
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for &v in row {
                if !v.is_finite() {
                    return Err(MatrixError::NonFinite);
                }
                data.push(v);
            }
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut data = alloc::vec![0.0; n * n];
        for (i, &v) in entries.iter().enumerate() {
            data[i * n + i] = v;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn apply(&self, x: &Point) -> Point {
        assert_eq!(x.dim(), self.cols);
        let xs = x.as_slice();
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let s = xs
                .iter()
                .enumerate()
                .map(|(j, &v)| self.get(i, j) * v)
                .sum();
            out.push(s);
        }
        Point::new(out).expect("finite matvec")
    }

    /// `A^T x`.
    pub fn transpose_apply(&self, x: &Point) -> Point {
        assert_eq!(x.dim(), self.rows);
        let xs = x.as_slice();
        let mut out = alloc::vec![0.0; self.cols];
        for (i, &xi) in xs.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * xi;
            }
        }
        Point::new(out).expect("finite matvec")
    }

    /// `A^T A`, symmetric positive semidefinite.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut data = alloc::vec![0.0; n * n];
        for j in 0..n {
            for k in j..n {
                let mut s = 0.0;
                for i in 0..self.rows {
                    s += self.get(i, j) * self.get(i, k);
                }
                data[j * n + k] = s;
                data[k * n + j] = s;
            }
        }
        Matrix { rows: n, cols: n, data }
    }

    /// `self + shift * I`; square matrices only.
    pub fn shift_diag(&self, shift: f64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i] += shift;
        }
        out
    }

    /// Solve `self * x = b` by Cholesky factorization; `self` must be
    /// symmetric positive definite. One step of iterative refinement keeps
    /// the residual near machine precision.
    pub fn solve_spd(&self, b: &Point) -> Result<Point, MatrixError> {
        assert_eq!(self.rows, self.cols);
        if b.dim() != self.rows {
            return Err(MatrixError::DimensionMismatch);
        }
        let chol = self.cholesky()?;
        let x = chol_solve(&chol, self.rows, b.as_slice());
        // refinement: x += solve(b - A x)
        let ax = self.apply(&Point::new(x.clone()).expect("finite solve"));
        let r: Vec<f64> = b
            .as_slice()
            .iter()
            .zip(ax.as_slice())
            .map(|(bi, axi)| bi - axi)
            .collect();
        let dx = chol_solve(&chol, self.rows, &r);
        let refined: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
        Point::new(refined).map_err(|_| MatrixError::NonFinite)
    }

    fn cholesky(&self) -> Result<Vec<f64>, MatrixError> {
        let n = self.rows;
        let mut l = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(MatrixError::NotPositiveDefinite);
                    }
                    l[i * n + i] = libm::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }

    /// Largest eigenvalue estimate of a symmetric positive semidefinite
    /// matrix by power iteration with a deterministic start vector.
    pub fn spectral_radius_est(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.3).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            let p = Point::new(v.clone()).expect("finite iterate");
            let w = self.apply(&p);
            let norm = w.norm();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = p.inner(&w) / p.inner(&p);
            v = w.scale(1.0 / norm).as_slice().to_vec();
        }
        lambda
    }
}

fn chol_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    // forward substitution L y = b
    let mut y = alloc::vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    // back substitution L^T x = y
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}
