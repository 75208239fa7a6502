use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Rational;

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Clone> SquareMatrix<T> {
    pub fn from_fn<F: FnMut(usize, usize) -> T>(dim: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        SquareMatrix { dim, entries }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(SquareMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.entries.chunks(self.dim.max(1))
    }

    pub fn map<U: Clone, F: Fn(&T) -> U>(&self, f: F) -> SquareMatrix<U> {
        SquareMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl SquareMatrix<Rational> {
    /// Exact test via symmetric Gaussian elimination (LDL^T): positive
    /// definite iff every pivot is strictly positive.
    pub fn is_positive_definite(&self) -> Result<bool> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..i {
                if self.get(i, j) != self.get(j, i) {
                    return Err(Error::Asymmetric);
                }
            }
        }
        let mut a = self.entries.clone();
        for k in 0..n {
            let pivot = a[k * n + k].clone();
            if !pivot.is_positive() {
                return Ok(false);
            }
            for i in k + 1..n {
                let lik = &a[i * n + k] / &pivot;
                if lik.is_zero() {
                    continue;
                }
                for j in k + 1..=i {
                    let delta = &lik * &a[k * n + j];
                    a[i * n + j] -= &delta;
                    if j != i {
                        a[j * n + i] -= delta;
                    }
                }
            }
        }
        Ok(true)
    }
}

impl SquareMatrix<f64> {
    /// Floating-point test. Entries that differ from their transpose by more
    /// than `tol` times the largest magnitude are rejected; otherwise the
    /// matrix is symmetrized and factored, and every pivot must exceed
    /// `tol` times that magnitude.
    pub fn is_positive_definite(&self, tol: f64) -> Result<bool> {
        let n = self.dim;
        let scale = self
            .entries
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut a = self.entries.clone();
        for i in 0..n {
            for j in 0..i {
                let (x, y) = (a[i * n + j], a[j * n + i]);
                if (x - y).abs() > tol * scale {
                    return Err(Error::Asymmetric);
                }
                let s = 0.5 * (x + y);
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
        }
        for k in 0..n {
            let pivot = a[k * n + k];
            if !(pivot > tol * scale) {
                return Ok(false);
            }
            for i in k + 1..n {
                let lik = a[i * n + k] / pivot;
                for j in k + 1..n {
                    a[i * n + j] -= lik * a[k * n + j];
                }
            }
        }
        Ok(true)
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl<T: fmt::Display> fmt::Display for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.entries[i * self.dim + j])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
