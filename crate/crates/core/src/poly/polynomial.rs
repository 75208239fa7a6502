use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::{basis_size, degree_basis};
use super::{MultiIndex, Rational};
use crate::error::{Error, Result};

/// Total degree of a polynomial. The zero polynomial has degree
/// [`Degree::NegInfinity`], which compares below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{}", d),
        }
    }
}

/// Sparse polynomial in `nvars` variables with exact rational coefficients.
///
/// No stored coefficient is zero, and every key has length `nvars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zeros(nvars), c);
        }
        p
    }

    /// The variable `x_{k+1}` (0-based `k`).
    pub fn var(nvars: usize, k: usize) -> Result<Self> {
        if k >= nvars {
            return Err(Error::VariableOutOfRange { index: k, nvars });
        }
        Ok(Self::monomial(MultiIndex::unit(nvars, k, 1), Rational::one()))
    }

    pub fn monomial(exponents: MultiIndex, coef: Rational) -> Self {
        let nvars = exponents.len();
        let mut p = Self::zero(nvars);
        if !coef.is_zero() {
            p.terms.insert(exponents, coef);
        }
        p
    }

    /// Sums the given terms, merging repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order (descending graded lex).
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, e: &MultiIndex) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            Some(e) => Degree::Finite(e.total_degree() as u32),
            None => Degree::NegInfinity,
        }
    }

    /// True when every stored term has the same total degree. The zero
    /// polynomial counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.total_degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Degree of a nonzero homogeneous polynomial.
    pub fn homogeneous_degree(&self) -> Result<u32> {
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        self.degree().finite().ok_or(Error::ZeroPolynomial)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() <= Degree::Finite(0)
    }

    /// Smallest stored coefficient, if any.
    pub fn min_coefficient(&self) -> Option<&Rational> {
        self.terms.values().min()
    }

    /// True when every stored coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Number of monomials of the same degree as this (homogeneous) polynomial
    /// that a dense representation would hold.
    pub fn dense_basis_size(nvars: usize, degree: u64) -> u128 {
        basis_size(nvars, degree)
    }

    /// The full degree-`d` monomial basis in `nvars` variables, canonical order.
    pub fn monomial_basis(nvars: usize, d: u32) -> Vec<MultiIndex> {
        degree_basis(nvars, d)
    }

    fn check_nvars(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut acc: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// `self^m` by square-and-multiply; `pow(0)` is the constant 1.
    pub fn pow(&self, m: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to the 0-based variable `k`.
    pub fn partial_derivative(&self, k: usize) -> Result<Polynomial> {
        if k >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: k,
                nvars: self.nvars,
            });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            let ek = e.exponents()[k];
            if ek == 0 {
                continue;
            }
            let mut ne = e.exponents().to_vec();
            ne[k] -= 1;
            out.add_term(MultiIndex::new(ne), c * Rational::from_integer(ek.into()));
        }
        Ok(out)
    }

    /// Sets variable `k` to zero and removes it, leaving `nvars - 1` variables.
    pub fn restrict_to_facet(&self, k: usize) -> Result<Polynomial> {
        if k >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: k,
                nvars: self.nvars,
            });
        }
        if self.nvars == 1 {
            return Err(Error::InvalidArgument(
                "cannot remove the only variable".into(),
            ));
        }
        let mut out = Polynomial::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let ex = e.exponents();
            if ex[k] != 0 {
                continue;
            }
            let ne: Vec<u32> = ex
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| v)
                .collect();
            out.add_term(MultiIndex::new(ne), c.clone());
        }
        Ok(out)
    }

    /// Re-embeds a polynomial in `nvars + 1` variables with the new variable
    /// inserted at position `k` (exponent 0 everywhere).
    pub fn insert_variable(&self, k: usize) -> Result<Polynomial> {
        if k > self.nvars {
            return Err(Error::VariableOutOfRange {
                index: k,
                nvars: self.nvars + 1,
            });
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let mut ne = e.exponents().to_vec();
            ne.insert(k, 0);
            (MultiIndex::new(ne), c.clone())
        });
        Polynomial::from_terms(self.nvars + 1, terms)
    }

    /// The polynomial `p_{l,sigma}` in `ell` variables.
    ///
    /// `sigma` is a 0-based permutation of the coordinate positions: the
    /// result is `p` evaluated at the point whose `sigma[i]`-th coordinate is
    /// the `i`-th entry of `(s_1, ..., s_ell, 0, ..., 0, 1)`.
    pub fn dehomogenize(&self, ell: usize, sigma: &[usize]) -> Result<Polynomial> {
        let n = self.nvars;
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        if ell == 0 || ell + 1 > n {
            return Err(Error::InvalidArgument(alloc::format!(
                "ell must lie in 1..={} for {} variables",
                n.saturating_sub(1),
                n
            )));
        }
        check_permutation(sigma, n)?;
        let mut out = Polynomial::zero(ell);
        'terms: for (e, c) in &self.terms {
            let ex = e.exponents();
            for &pos in &sigma[ell..n - 1] {
                if ex[pos] != 0 {
                    continue 'terms;
                }
            }
            let ne: Vec<u32> = sigma[..ell].iter().map(|&pos| ex[pos]).collect();
            out.add_term(MultiIndex::new(ne), c.clone());
        }
        Ok(out)
    }

    /// Applies `x_i -> x_{perm[i]}` to every term (0-based).
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Polynomial> {
        check_permutation(perm, self.nvars)?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut ne = alloc::vec![0u32; self.nvars];
            for (i, &v) in e.exponents().iter().enumerate() {
                ne[perm[i]] = v;
            }
            (MultiIndex::new(ne), c.clone())
        });
        Polynomial::from_terms(self.nvars, terms)
    }

    /// Canonical text in the `x1..xn` naming.
    pub fn serialize(&self) -> String {
        self.serialize_with_prefix('x')
    }

    /// Canonical text with variables named `<prefix>1..<prefix>n`.
    pub fn serialize_with_prefix(&self, prefix: char) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let abs = c.abs();
            let is_const = e.total_degree() == 0;
            let mut need_star = false;
            if is_const || !abs.is_one() {
                let _ = write!(out, "{}", abs);
                need_star = true;
            }
            for (k, &p) in e.exponents().iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if need_star {
                    out.push('*');
                }
                let _ = write!(out, "{}{}", prefix, k + 1);
                if p > 1 {
                    let _ = write!(out, "^{}", p);
                }
                need_star = true;
            }
        }
        out
    }
}

pub(crate) fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sigma.len(),
        });
    }
    let mut seen = alloc::vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::InvalidArgument("sigma is not a permutation".into()));
        }
        seen[s] = true;
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

// Operator forms panic on a variable-count mismatch; use the `checked_*`
// methods when the inputs are not known to agree.

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial add: nvars mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial sub: nvars mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial mul: nvars mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
