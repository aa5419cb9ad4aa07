//! Dense exact linear algebra over any [`Field`].
//!
//! Elimination pivots on the first nonzero entry, scanning columns left to
//! right and rows top to bottom, so every result is deterministic.

use std::fmt;

use thiserror::Error;

use crate::field::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrices belong to different fields")]
    FieldMismatch,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("matrix is singular")]
    Singular,
}

/// Row-major matrix whose entries all live in one field.
#[derive(Clone, PartialEq)]
pub struct Matrix<K: Field> {
    field: K,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl<K: Field> Matrix<K> {
    pub fn new(field: K, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: K, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: K, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds from equal-length rows; `cols` fixes the width when there are
    /// no rows.
    pub fn from_rows<R: AsRef<[u64]>>(field: K, cols: usize, rows: &[R]) -> Result<Self, MatrixError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(MatrixError::DimensionMismatch(format!(
                    "row of length {} in a matrix of width {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Row i is (1, x_i, x_i^2, ..., x_i^(cols-1)).
    pub fn vandermonde(field: K, points: &[u64], cols: usize) -> Self {
        let mut data = Vec::with_capacity(points.len() * cols);
        for &x in points {
            let mut acc = 1;
            for _ in 0..cols {
                data.push(acc);
                acc = field.mul(acc, x);
            }
        }
        Matrix {
            field,
            rows: points.len(),
            cols,
            data,
        }
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field.clone(),
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            data.extend(idx.iter().map(|&c| self.get(r, c)));
        }
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), MatrixError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(MatrixError::FieldMismatch)
        }
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &Self) -> Result<Self, MatrixError> {
        self.check_field(below)?;
        if self.cols != below.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "stacking width {} on width {}",
                below.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    /// Horizontal concatenation.
    pub fn augment(&self, right: &Self) -> Result<Self, MatrixError> {
        self.check_field(right)?;
        if self.rows != right.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "augmenting {} rows with {} rows",
                self.rows, right.rows
            )));
        }
        let cols = self.cols + right.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(right.row(r));
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let k = &self.field;
        let mut out = Self::zeros(k.clone(), self.rows, rhs.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(r, i);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let idx = r * rhs.cols + c;
                    out.data[idx] = k.add(out.data[idx], k.mul(a, rhs.get(i, c)));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let k = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &x)| k.add(acc, k.mul(a, x)))
            })
            .collect())
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    /// Only the first `limit` columns are used for pivoting.
    fn reduce(&mut self, limit: usize) -> Vec<usize> {
        let k = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..limit.min(cols) {
            if pr == self.rows {
                break;
            }
            let Some(src) = (pr..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if src != pr {
                for j in 0..cols {
                    self.data.swap(src * cols + j, pr * cols + j);
                }
            }
            let inv = k.inv(self.data[pr * cols + c]).expect("pivot is nonzero");
            for j in c..cols {
                self.data[pr * cols + j] = k.mul(self.data[pr * cols + j], inv);
            }
            for r in 0..self.rows {
                if r == pr {
                    continue;
                }
                let f = self.data[r * cols + c];
                if f == 0 {
                    continue;
                }
                for j in c..cols {
                    let v = k.mul(f, self.data[pr * cols + j]);
                    self.data[r * cols + j] = k.sub(self.data[r * cols + j], v);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Self {
        let mut m = self.clone();
        m.reduce(self.cols);
        m
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut m = self.clone();
        m.reduce(self.cols).len()
    }

    /// One solution `x` of `self * x = b`.
    pub fn solve(&self, b: &Self) -> Result<Self, MatrixError> {
        if b.rows != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "right-hand side has {} rows, system has {}",
                b.rows, self.rows
            )));
        }
        let mut aug = self.augment(b)?;
        let pivots = aug.reduce(self.cols);
        let rank = pivots.len();
        for r in rank..aug.rows {
            if (self.cols..aug.cols).any(|c| aug.get(r, c) != 0) {
                return Err(MatrixError::Inconsistent);
            }
        }
        // free variables are set to zero
        let mut x = Self::zeros(self.field.clone(), self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                x.set(pc, c, aug.get(r, self.cols + c));
            }
        }
        Ok(x)
    }

    pub fn invert(&self) -> Result<Self, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = self.augment(&Self::identity(self.field.clone(), n))?;
        if aug.reduce(n).len() < n {
            return Err(MatrixError::Singular);
        }
        Ok(aug.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }
}

impl<K: Field> fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:x?}", self.row(r))?;
        }
        Ok(())
    }
}
