use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{to_f64, Interval, Polynomial, Rational};
use crate::error::{Error, Result};

/// A point `z = (z_1, ..., z_n)` of complex space with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint(Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("complex point must be finite".into()));
        }
        Ok(ComplexPoint(coords))
    }

    pub fn from_real(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(|z_1|, ..., |z_n|)`.
    pub fn moduli(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.norm()).collect()
    }
}

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, c: &Rational) -> Self {
        GaussianRational {
            re: &self.re * c,
            im: &self.im * c,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

/// Generic power table: `table[k][e] = x_k^e` for every exponent used by `p`.
fn power_table<T, F>(p: &Polynomial, x: &[T], one: T, mul: F) -> Vec<Vec<T>>
where
    T: Clone,
    F: Fn(&T, &T) -> T,
{
    let mut max_e = alloc::vec![0u32; p.nvars()];
    for (e, _) in p.terms() {
        for (k, &v) in e.exponents().iter().enumerate() {
            max_e[k] = max_e[k].max(v);
        }
    }
    x.iter()
        .zip(&max_e)
        .map(|(xk, &m)| {
            let mut row = Vec::with_capacity(m as usize + 1);
            row.push(one.clone());
            for i in 0..m as usize {
                let next = mul(&row[i], xk);
                row.push(next);
            }
            row
        })
        .collect()
}

impl Polynomial {
    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: n,
            });
        }
        Ok(())
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, x: &[Rational]) -> Result<Rational> {
        self.check_len(x.len())?;
        let table = power_table(self, x, Rational::one(), |a, b| a * b);
        let mut acc = Rational::zero();
        for (e, c) in self.terms() {
            let mut t = c.clone();
            for (k, &v) in e.exponents().iter().enumerate() {
                if v > 0 {
                    t *= &table[k][v as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact value at a point with Gaussian-rational coordinates.
    pub fn eval_gaussian(&self, z: &[GaussianRational]) -> Result<GaussianRational> {
        self.check_len(z.len())?;
        let table = power_table(self, z, GaussianRational::one(), |a, b| a * b);
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (e, c) in self.terms() {
            let mut t = GaussianRational::real(c.clone());
            for (k, &v) in e.exponents().iter().enumerate() {
                if v > 0 {
                    t = &t * &table[k][v as usize];
                }
            }
            re += t.re;
            im += t.im;
        }
        Ok(GaussianRational { re, im })
    }

    /// Double-precision value at a real point.
    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        let table = power_table(self, x, 1.0, |a, b| a * b);
        Ok(self
            .terms()
            .map(|(e, c)| {
                e.exponents()
                    .iter()
                    .enumerate()
                    .fold(to_f64(c), |acc, (k, &v)| acc * table[k][v as usize])
            })
            .sum())
    }

    pub fn eval_complex(&self, z: &ComplexPoint) -> Result<Complex64> {
        self.eval_complex_slice(z.coords())
    }

    pub fn eval_complex_slice(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_len(z.len())?;
        let table = power_table(self, z, Complex64::new(1.0, 0.0), |a, b| a * b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            let mut t = Complex64::new(to_f64(c), 0.0);
            for (k, &v) in e.exponents().iter().enumerate() {
                if v > 0 {
                    t *= table[k][v as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Enclosure of the range of the polynomial over a box.
    pub fn eval_interval(&self, bx: &[Interval]) -> Result<Interval> {
        self.check_len(bx.len())?;
        let mut acc = Interval::point(0.0);
        for (e, c) in self.terms() {
            let mut t = Interval::from_rational(c);
            for (k, &v) in e.exponents().iter().enumerate() {
                if v > 0 {
                    t = t * bx[k].powi(v);
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}
