//! The Hermitian bihomogeneous form `P(z, conj w) = p(z_1 conj w_1, ..., z_n conj w_n)`
//! and the probes built on it.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::SquareMatrix;
use crate::poly::{ComplexPoint, MultiIndex, Polynomial, Rational};

/// `sum_I c_I z^I conj(w)^I`.
pub fn assoc_bihom_eval(p: &Polynomial, z: &ComplexPoint, w: &ComplexPoint) -> Result<Complex64> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            found: w.len(),
        });
    }
    let prod: Vec<Complex64> = z
        .coords()
        .iter()
        .zip(w.coords())
        .map(|(a, b)| a * b.conj())
        .collect();
    p.eval_complex_slice(&prod)
}

/// Outcome of the strict Cauchy-Schwarz test at one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sgcs {
    StrictHolds,
    EqualityOnDependent,
    Violated,
}

/// Compares `|P(z, conj w)|^2` with `P(z, conj z) P(w, conj w)`.
///
/// Both the dependence test and the equality test are relative to `tol`.
pub fn check_sgcs(p: &Polynomial, z: &ComplexPoint, w: &ComplexPoint, tol: f64) -> Result<Sgcs> {
    let zw = assoc_bihom_eval(p, z, w)?;
    let zz = assoc_bihom_eval(p, z, z)?.re;
    let ww = assoc_bihom_eval(p, w, w)?.re;
    let lhs = zw.norm_sqr();
    let rhs = zz * ww;
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    let equal = (lhs - rhs).abs() <= tol * scale;

    let inner: Complex64 = z.coords().iter().zip(w.coords()).map(|(a, b)| a * b.conj()).sum();
    let nz: f64 = z.coords().iter().map(|c| c.norm_sqr()).sum();
    let nw: f64 = w.coords().iter().map(|c| c.norm_sqr()).sum();
    let dependent = nz * nw - inner.norm_sqr() <= tol * (nz * nw).max(f64::MIN_POSITIVE);

    Ok(if dependent {
        if equal {
            Sgcs::EqualityOnDependent
        } else {
            Sgcs::Violated
        }
    } else if lhs < rhs && !equal {
        Sgcs::StrictHolds
    } else {
        Sgcs::Violated
    })
}

/// Coefficient matrix `C` of `P(z, conj w) = sum C_IJ z^I conj(w)^J` over the
/// full basis of degree-`d` monomials (descending graded-lex). For a form
/// coming from `p` it is `diag(c_I)`.
pub fn hermitian_gram_matrix(p: &Polynomial) -> Result<(Vec<MultiIndex>, SquareMatrix<Rational>)> {
    let d = p.homogeneous_degree()?;
    let basis = Polynomial::monomial_basis(p.nvars(), d);
    let coef: Vec<Rational> = basis.iter().map(|e| p.coefficient(e)).collect();
    let m = SquareMatrix::from_fn(basis.len(), |i, j| {
        if i == j {
            coef[i].clone()
        } else {
            Rational::zero()
        }
    });
    Ok((basis, m))
}

/// Whether `P` is a maximal squared norm, i.e. its diagonal coefficient
/// matrix over the full monomial basis is positive definite.
pub fn max_squared_norm_diag(p: &Polynomial) -> Result<bool> {
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if p.is_zero() {
        return Ok(false);
    }
    hermitian_gram_matrix(p)?.1.is_positive_definite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(v: &[Complex64]) -> ComplexPoint {
        ComplexPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_monomial() {
        let p = parse("x1", 2).unwrap();
        let v = assoc_bihom_eval(&p, &pt(&[c(0.0, 1.0), c(0.0, 0.0)]), &pt(&[c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_restriction() {
        let p = parse("x1^2 - 3*x1*x2 + 5*x2^2", 2).unwrap();
        let z = pt(&[c(0.3, -1.2), c(2.0, 0.5)]);
        let v = assoc_bihom_eval(&p, &z, &z).unwrap();
        let m = z.moduli();
        let direct = p.eval_f64(&[m[0] * m[0], m[1] * m[1]]).unwrap();
        assert!((v.re - direct).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn sgcs_cases() {
        let violator = parse("(x1+x2)^4 - 8*x1^2*x2^2", 2).unwrap();
        let z = pt(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let w = pt(&[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(check_sgcs(&violator, &z, &w, 1e-9).unwrap(), Sgcs::Violated);

        let lin = parse("x1+x2", 2).unwrap();
        let z = pt(&[c(1.0, 2.0), c(-0.5, 0.25)]);
        let w2 = pt(&[c(2.0, 4.0), c(-1.0, 0.5)]);
        assert_eq!(check_sgcs(&lin, &z, &w2, 1e-9).unwrap(), Sgcs::EqualityOnDependent);
        let w = pt(&[c(0.3, 0.0), c(1.0, -1.0)]);
        assert_eq!(check_sgcs(&lin, &z, &w, 1e-9).unwrap(), Sgcs::StrictHolds);
    }

    #[test]
    fn squared_norm_examples() {
        assert!(max_squared_norm_diag(&parse("(x1+x2)^2", 2).unwrap()).unwrap());
        assert!(!max_squared_norm_diag(&parse("x1^2+x2^2", 2).unwrap()).unwrap());
        let q = parse("x1^2-x1*x2+x2^2", 2).unwrap();
        let lin = parse("x1+x2", 2).unwrap();
        assert!(!max_squared_norm_diag(&(&lin.pow(2) * &q)).unwrap());
        assert!(max_squared_norm_diag(&(&lin.pow(3) * &q)).unwrap());
        assert!(max_squared_norm_diag(&parse("x1+1", 1).unwrap()).is_err());
    }

    #[test]
    fn gram_is_diagonal() {
        let (basis, m) = hermitian_gram_matrix(&parse("(x1+x2)^2", 2).unwrap()).unwrap();
        assert_eq!(basis.len(), 3);
        assert_eq!(m.get(1, 1), &Rational::from_integer(2.into()));
        assert!(m.is_positive_definite().unwrap());
    }
}
