//! Exact sparse multivariate polynomials over the rationals.
//!
//! Coefficients are [`Rational`] (arbitrary precision, always reduced).
//! Terms iterate in canonical order: higher total degree first, then
//! lexicographically larger exponent vectors first, so `(x1+x2)^2` reads
//! `x1^2 + 2*x1*x2 + x2^2`.
//!
//! Variables are addressed by 0-based index in the API and named
//! `x1..xn` (or `s1..sn`) in text.

mod eval;
mod interval;
mod monomial;
mod parse;
mod polynomial;

pub use eval::{ComplexPoint, GaussianRational};
pub use interval::Interval;
pub use monomial::MultiIndex;
pub use parse::parse;
pub use polynomial::{Degree, Polynomial};

/// Exact rational number; always stored in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub use num_complex::Complex64;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Builds `n/1`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `num/den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest double to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match r.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            // Fall back to scaling both parts down when they overflow a double.
            let n = r.numer().bits() as i64;
            let d = r.denom().bits() as i64;
            let shift = (n.max(d) - 1000).max(0) as usize;
            let num = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let den = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            if den == 0.0 {
                if r.is_positive() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                num / den
            }
        }
    }
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and their semiconvergents).
pub fn best_rational(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let mut y = libm::fabs(x);
    let (mut p0, mut q0, mut p1, mut q1): (u64, u64, u64, u64) = (0, 1, 1, 0);
    let mut best = (libm::floor(y) as u64, 1u64);
    loop {
        let a = libm::floor(y);
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            // Semiconvergent: largest k with k*q1 + q0 <= max_den.
            if let Some(k) = (max_den - q0).checked_div(q1) {
                let cand = (k * p1 + p0, k * q1 + q0);
                let err = |p: u64, q: u64| libm::fabs(p as f64 / q as f64 - libm::fabs(x));
                if cand.1 > 0 && err(cand.0, cand.1) < err(p1, q1) {
                    best = cand;
                } else {
                    best = (p1, q1);
                }
            }
            break;
        }
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        best = (p2, q2);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = y - a as f64;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    let r = Rational::new(BigInt::from(best.0), BigInt::from(best.1.max(1)));
    if neg {
        -r
    } else {
        r
    }
}
