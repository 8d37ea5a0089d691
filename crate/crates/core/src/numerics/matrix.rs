use super::scalar::Scalar;
use super::vector::Vector;
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| S::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> Vector<S> {
        self.data[i * self.cols..(i + 1) * self.cols]
            .iter()
            .cloned()
            .collect()
    }

    pub fn col(&self, j: usize) -> Vector<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(idx, x)| (idx / self.cols, idx % self.cols, x))
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &Vector<S>) -> Vector<S> {
        debug_assert_eq!(x.dim(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x.iter())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `M^T y`.
    pub fn tr_mul_vec(&self, y: &Vector<S>) -> Vector<S> {
        debug_assert_eq!(y.dim(), self.rows);
        let mut out = Vector::<S>::zeros(self.cols);
        for (i, yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j].clone() + yi.clone() * self.get(i, j).clone();
            }
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    /// `self + c * x y^T`.
    pub fn add_outer(&self, c: &S, x: &Vector<S>, y: &Vector<S>) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            if x[i].is_zero() {
                continue;
            }
            let xi = c.clone() * x[i].clone();
            for j in 0..self.cols {
                let idx = i * self.cols + j;
                out.data[idx] = out.data[idx].clone() + xi.clone() * y[j].clone();
            }
        }
        out
    }

    /// Maximum absolute entry (the `‖·‖_{1,∞}` operator norm).
    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, x| S::max_of(acc, x.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for (i, j, x) in self.entries() {
            out.set(j, i, x.clone());
        }
        out
    }

    pub fn map_mode<T: Scalar>(&self) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(super::scalar::convert).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).into_inner()).collect()
    }
}
