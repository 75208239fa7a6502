//! Supports, Newton-polytope dimension, difference lattices, the `J_f`
//! matrix with its finite-difference cross-check, and the AM-GM type
//! inequality `p(sqrt(x*y))^2 <= p(x) p(y)`.

pub mod lattice;
mod matrix;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{to_f64, MultiIndex, Polynomial, Rational};

pub use matrix::SquareMatrix;

/// `Log(f)`: the exponents that carry a nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    nvars: usize,
    indices: BTreeSet<MultiIndex>,
}

impl SupportSet {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, e: &MultiIndex) -> bool {
        self.indices.contains(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> + '_ {
        self.indices.iter()
    }

    /// Rows `I - I0` for a fixed `I0` in the support.
    pub fn difference_rows(&self) -> Vec<Vec<BigInt>> {
        let mut it = self.indices.iter();
        let base = match it.next() {
            Some(b) => b.exponents().to_vec(),
            None => return Vec::new(),
        };
        it.map(|e| {
            e.exponents()
                .iter()
                .zip(&base)
                .map(|(&a, &b)| BigInt::from(a as i64 - b as i64))
                .collect()
        })
        .collect()
    }
}

pub fn log_support(f: &Polynomial) -> Result<SupportSet> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(SupportSet {
        nvars: f.nvars(),
        indices: f.terms().map(|(e, _)| e.clone()).collect(),
    })
}

/// Affine dimension of the Newton polytope of `f`.
pub fn newton_affine_dim(f: &Polynomial) -> Result<usize> {
    let s = log_support(f)?;
    Ok(lattice::rank(&s.difference_rows()))
}

/// Structure of the lattice spanned by `{I - J : I, J in Log(f)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeReport {
    pub dim: usize,
    pub rank: usize,
    pub invariant_factors: Vec<BigInt>,
    pub full: bool,
}

pub fn difference_lattice(f: &Polynomial) -> Result<LatticeReport> {
    let s = log_support(f)?;
    let factors = lattice::invariant_factors(&s.difference_rows());
    let dim = f.nvars();
    let full = factors.len() == dim && factors.iter().all(|v| v == &BigInt::from(1));
    Ok(LatticeReport {
        dim,
        rank: factors.len(),
        invariant_factors: factors,
        full,
    })
}

/// True iff the difference lattice of `Log(f)` is all of `Z^l`.
pub fn difference_lattice_is_full(f: &Polynomial) -> Result<bool> {
    Ok(difference_lattice(f)?.full)
}

/// `J_f(s)_{ij} = s_i s_j d_i d_j log f + delta_ij s_i d_i log f`, exactly.
pub fn jf_matrix(f: &Polynomial, s: &[Rational]) -> Result<SquareMatrix<Rational>> {
    let n = f.nvars();
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.len(),
        });
    }
    if s.iter().any(|v| !v.is_positive()) {
        return Err(Error::NonPositive("J_f needs an interior point".into()));
    }
    let value = f.eval_rational(s)?;
    if !value.is_positive() {
        return Err(Error::NonPositive("f(s) must be positive".into()));
    }
    let first: Vec<Polynomial> = (0..n)
        .map(|i| f.partial_derivative(i))
        .collect::<Result<_>>()?;
    let grad: Vec<Rational> = first
        .iter()
        .map(|d| d.eval_rational(s))
        .collect::<Result<_>>()?;
    let mut hess: Vec<Rational> = Vec::with_capacity(n * n);
    for (i, di) in first.iter().enumerate() {
        for j in 0..n {
            if j < i {
                let v: Rational = hess[j * n + i].clone();
                hess.push(v);
            } else {
                hess.push(di.partial_derivative(j)?.eval_rational(s)?);
            }
        }
    }
    let f2 = &value * &value;
    Ok(SquareMatrix::from_fn(n, |i, j| {
        let second = &hess[i * n + j] / &value - &grad[i] * &grad[j] / &f2;
        let mut v = &s[i] * &s[j] * second;
        if i == j {
            v += &s[i] * &grad[i] / &value;
        }
        v
    }))
}

/// Central-difference Hessian of `t -> log f(e^{t_1}, ..., e^{t_l})`.
pub fn hessian_logf_fd(f: &Polynomial, t: &[f64], h: f64) -> Result<SquareMatrix<f64>> {
    let n = f.nvars();
    if t.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.len(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let g = |shift: &[(usize, f64)]| -> Result<f64> {
        let mut x: Vec<f64> = t.to_vec();
        for &(k, d) in shift {
            x[k] += d;
        }
        let s: Vec<f64> = x.iter().map(|&v| libm::exp(v)).collect();
        let v = f.eval_f64(&s)?;
        if !(v > 0.0) {
            return Err(Error::NonPositive("f(e^t) in the stencil".into()));
        }
        Ok(libm::log(v))
    };
    let center = g(&[])?;
    let mut out = alloc::vec![0.0; n * n];
    for i in 0..n {
        let plus = g(&[(i, h)])?;
        let minus = g(&[(i, -h)])?;
        out[i * n + i] = (plus - 2.0 * center + minus) / (h * h);
        for j in 0..i {
            let pp = g(&[(i, h), (j, h)])?;
            let pm = g(&[(i, h), (j, -h)])?;
            let mp = g(&[(i, -h), (j, h)])?;
            let mm = g(&[(i, -h), (j, -h)])?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Ok(SquareMatrix::from_fn(n, |i, j| out[i * n + j]))
}

/// Checks `p(sqrt(x_1 y_1), ..., sqrt(x_n y_n))^2 <= p(x) p(y)` up to a
/// relative tolerance. The left side goes through double precision
/// because of the square roots; the right side is exact.
pub fn amgm_check(p: &Polynomial, x: &[Rational], y: &[Rational], tol: f64) -> Result<bool> {
    let n = p.nvars();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        if v.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidArgument("points must be nonnegative".into()));
        }
    }
    let mid: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| libm::sqrt(to_f64(a) * to_f64(b)))
        .collect();
    let left = p.eval_f64(&mid)?;
    let left = left * left;
    let right = to_f64(&(p.eval_rational(x)? * p.eval_rational(y)?));
    let scale = left.abs().max(right.abs());
    Ok(left <= right + tol * scale || (scale.is_zero()))
}
