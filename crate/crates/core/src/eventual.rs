//! Scans of `p^m * q` for all-positive coefficients, and Pólya exponents.

use alloc::string::String;
use alloc::vec::Vec;

use alloc::vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial, Rational};

/// Default cap on the dense coefficient count of the last scanned product.
pub const DEFAULT_MAX_COEFFICIENTS: u128 = 2_000_000;

/// True iff `f` is homogeneous of some degree `d` and every degree-`d`
/// monomial carries a strictly positive coefficient. A missing monomial
/// counts as a zero coefficient, so the answer is then `false`.
pub fn all_coeffs_positive(f: &Polynomial) -> Result<bool> {
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let d = match f.degree().finite() {
        Some(d) => d,
        None => return Ok(false),
    };
    let full = Polynomial::dense_basis_size(f.nvars(), d as u64);
    Ok(f.num_terms() as u128 == full && f.terms().all(|(_, c)| c.is_positive()))
}

/// One step of a power scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanStep {
    pub m: u32,
    pub all_positive: bool,
    pub num_terms: usize,
    /// Smallest coefficient over the full degree basis; a missing monomial
    /// contributes 0.
    pub min_coef: Rational,
}

/// Positivity flags of `p^m * q` for `m = 0..=max_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityPattern {
    pub p_id: String,
    pub q_id: String,
    pub steps: Vec<ScanStep>,
    /// Least `m` such that every scanned power from `m` through `max_m` is
    /// all-positive. Relative to the scanned window only.
    pub onset: Option<u32>,
    pub first_true: Option<u32>,
}

impl PositivityPattern {
    pub fn flags(&self) -> Vec<bool> {
        self.steps.iter().map(|s| s.all_positive).collect()
    }

    pub fn max_m(&self) -> u32 {
        self.steps.last().map(|s| s.m).unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub max_m: u32,
    pub max_coefficients: u128,
}

impl ScanOptions {
    pub fn new(max_m: u32) -> Self {
        ScanOptions {
            max_m,
            max_coefficients: DEFAULT_MAX_COEFFICIENTS,
        }
    }
}

/// Scans `p^m * q` for `m = 0..=max_m` with the default size cap.
pub fn power_scan(p: &Polynomial, q: &Polynomial, max_m: u32) -> Result<PositivityPattern> {
    power_scan_with(p, q, &ScanOptions::new(max_m))
}

pub fn power_scan_with(
    p: &Polynomial,
    q: &Polynomial,
    opts: &ScanOptions,
) -> Result<PositivityPattern> {
    if p.nvars() != q.nvars() {
        return Err(Error::NvarsMismatch {
            left: p.nvars(),
            right: q.nvars(),
        });
    }
    let d = p.homogeneous_degree()?;
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let dq = q.homogeneous_degree()?;
    let top = opts.max_m as u64 * d as u64 + dq as u64;
    let size = Polynomial::dense_basis_size(p.nvars(), top);
    if size > opts.max_coefficients {
        return Err(Error::TooLarge {
            what: "dense coefficient count",
            size,
            cap: opts.max_coefficients,
        });
    }

    let mut steps = Vec::with_capacity(opts.max_m as usize + 1);
    let mut powers = DensePowers::new(p, q, top as u32);
    for m in 0..=opts.max_m {
        if m > 0 {
            powers.step();
        }
        steps.push(powers.inspect(m));
    }

    let first_true = steps.iter().find(|s| s.all_positive).map(|s| s.m);
    let onset = if steps.last().map(|s| s.all_positive).unwrap_or(false) {
        let tail = steps.iter().rev().take_while(|s| s.all_positive).count();
        Some(opts.max_m + 1 - tail as u32)
    } else {
        None
    };
    Ok(PositivityPattern {
        p_id: p.serialize(),
        q_id: q.serialize(),
        steps,
        onset,
        first_true,
    })
}

/// Integer coefficients `L * f` with `L` the least common denominator.
fn integer_terms(f: &Polynomial) -> (Vec<(Vec<u32>, BigInt)>, BigInt) {
    let l = f
        .terms()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let terms = f
        .terms()
        .map(|(e, c)| (e.exponents().to_vec(), (c * Rational::from_integer(l.clone())).to_integer()))
        .collect();
    (terms, l)
}

/// Rank of a degree-`d` exponent vector in `0..C(d + n - 1, n - 1)` through
/// the combinatorial number system on the stars-and-bars positions.
struct Ranker {
    binom: Vec<Vec<usize>>,
}

impl Ranker {
    fn new(n: usize, top: u32) -> Self {
        let rows = top as usize + n;
        let mut binom = vec![vec![0usize; n.max(1)]; rows];
        for (a, row) in binom.iter_mut().enumerate() {
            row[0] = 1;
            for i in 1..n {
                // C(a, i) = C(a, i - 1) * (a - i + 1) / i
                row[i] = if i > a { 0 } else { row[i - 1] * (a - i + 1) / i };
            }
        }
        Ranker { binom }
    }

    fn rank(&self, e: &[u32]) -> usize {
        let mut pos = 0usize;
        let mut r = 0usize;
        for (i, &x) in e[..e.len().saturating_sub(1)].iter().enumerate() {
            pos += x as usize;
            r += self.binom[pos + i][i + 1];
        }
        r
    }

    /// Degree-`d` basis listed in rank order.
    fn basis(&self, n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Polynomial::monomial_basis(n, d);
        out.sort_by_cached_key(|e| self.rank(e.exponents()));
        out
    }
}

/// `p^m * q` held as integer coefficients over the full degree basis, with
/// the positive scale that maps it back to rationals.
struct DensePowers {
    n: usize,
    p: Vec<(Vec<u32>, BigInt)>,
    p_scale: BigInt,
    degree: u32,
    step_degree: u32,
    ranker: Ranker,
    basis: Vec<MultiIndex>,
    coef: Vec<BigInt>,
    scale: BigInt,
}

impl DensePowers {
    fn new(p: &Polynomial, q: &Polynomial, top: u32) -> Self {
        let n = p.nvars();
        let (pt, p_scale) = integer_terms(p);
        let (qt, q_scale) = integer_terms(q);
        let degree = q.degree().finite().unwrap_or(0);
        let ranker = Ranker::new(n, top);
        let basis = ranker.basis(n, degree);
        let mut coef = vec![BigInt::zero(); basis.len()];
        for (e, c) in qt {
            coef[ranker.rank(&e)] = c;
        }
        DensePowers {
            n,
            p: pt,
            p_scale,
            degree,
            step_degree: p.degree().finite().unwrap_or(0),
            ranker,
            basis,
            coef,
            scale: q_scale,
        }
    }

    fn step(&mut self) {
        let degree = self.degree + self.step_degree;
        let basis = self.ranker.basis(self.n, degree);
        let mut next = vec![BigInt::zero(); basis.len()];
        let mut buf = vec![0u32; self.n];
        for (e, c) in self.basis.iter().zip(&self.coef) {
            if c.is_zero() {
                continue;
            }
            for (f, a) in &self.p {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = e.exponents()[k] + f[k];
                }
                next[self.ranker.rank(&buf)] += c * a;
            }
        }
        self.coef = next;
        self.basis = basis;
        self.degree = degree;
        self.scale *= &self.p_scale;
    }

    fn inspect(&self, m: u32) -> ScanStep {
        let num_terms = self.coef.iter().filter(|c| !c.is_zero()).count();
        let min = self.coef.iter().min().cloned().unwrap_or_else(BigInt::zero);
        ScanStep {
            m,
            all_positive: min.is_positive(),
            num_terms,
            min_coef: Rational::new(min, self.scale.clone()),
        }
    }

    fn all_positive(&self) -> bool {
        self.coef.iter().all(|c| c.is_positive())
    }
}

/// Least `N <= n_max` such that `(x_1 + ... + x_l)^N * g` has all positive
/// coefficients, or `None` when no such `N` exists in range.
///
/// Gives up immediately when some `g(e_i) <= 0`: the coefficient of
/// `x_i^{d+N}` in the product equals `g(e_i)` for every `N`.
pub fn polya_exponent(g: &Polynomial, n_max: u32) -> Result<Option<u32>> {
    Ok(polya_search(g, n_max)?.exponent)
}

/// Outcome of a Pólya search together with the number of products formed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyaSearch {
    pub exponent: Option<u32>,
    pub steps: u32,
}

pub fn polya_search(g: &Polynomial, n_max: u32) -> Result<PolyaSearch> {
    let d = g.homogeneous_degree()?;
    let n = g.nvars();
    for i in 0..n {
        if !g.coefficient(&MultiIndex::unit(n, i, d)).is_positive() {
            return Ok(PolyaSearch {
                exponent: None,
                steps: 0,
            });
        }
    }
    let mut linear = Polynomial::zero(n);
    for i in 0..n {
        linear = &linear + &Polynomial::var(n, i)?;
    }
    let mut powers = DensePowers::new(&linear, g, d + n_max);
    for k in 0..=n_max {
        if k > 0 {
            powers.step();
        }
        if powers.all_positive() {
            return Ok(PolyaSearch {
                exponent: Some(k),
                steps: k,
            });
        }
    }
    Ok(PolyaSearch {
        exponent: None,
        steps: n_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, parse};

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    #[test]
    fn all_positive_examples() {
        assert!(!all_coeffs_positive(&p("x1^3+x2^3", 2)).unwrap());
        assert!(all_coeffs_positive(&p("(x1+x2)^3", 2)).unwrap());
        assert!(all_coeffs_positive(&Polynomial::one(3)).unwrap());
        assert!(!all_coeffs_positive(&Polynomial::zero(2)).unwrap());
        assert_eq!(all_coeffs_positive(&p("x1+1", 1)), Err(Error::NotHomogeneous));
    }

    #[test]
    fn cube_of_dv7_has_negative_middle() {
        let p7 = p("(x1+x2)^4 - 7*x1^2*x2^2", 2);
        let c = p7.pow(3);
        assert!(!all_coeffs_positive(&c).unwrap());
        assert_eq!(c.coefficient(&MultiIndex::new(alloc::vec![6, 6])), int(-7));
    }

    #[test]
    fn polya_examples() {
        assert_eq!(polya_exponent(&p("x1^2-x1*x2+x2^2", 2), 10).unwrap(), Some(3));
        assert_eq!(polya_exponent(&p("x1^2+x1*x2+x2^2", 2), 10).unwrap(), Some(0));
        assert_eq!(polya_exponent(&p("-x1", 1), 10).unwrap(), None);
        assert_eq!(polya_exponent(&p("x1^2-3*x1*x2+x2^2", 2), 40).unwrap(), None);
    }

    #[test]
    fn scan_all_positive_p_with_unit_q() {
        let pat = power_scan(&p("x1+2*x2", 2), &Polynomial::one(2), 5).unwrap();
        assert!(pat.flags().iter().all(|&f| f));
        assert_eq!(pat.onset, Some(0));
        assert_eq!(pat.first_true, Some(0));
    }

    #[test]
    fn dense_scan_matches_expansion() {
        let f = p("x1^2 - 3/2*x1*x3 + x2*x3 + 2/3*x3^2", 3);
        let q = p("x1 - 1/5*x2 + x3", 3);
        let pat = power_scan(&f, &q, 5).unwrap();
        for s in &pat.steps {
            let prod = &f.pow(s.m) * &q;
            let d = prod.degree().finite().unwrap();
            let basis = Polynomial::monomial_basis(3, d);
            let min = basis.iter().map(|e| prod.coefficient(e)).min().unwrap();
            assert_eq!(s.min_coef, min);
            assert_eq!(s.num_terms, prod.num_terms());
            assert_eq!(s.all_positive, all_coeffs_positive(&prod).unwrap());
        }
    }

    #[test]
    fn scan_guardrail() {
        let opts = ScanOptions {
            max_m: 50,
            max_coefficients: 100,
        };
        let r = power_scan_with(&p("x1+x2+x3", 3), &Polynomial::one(3), &opts);
        assert!(matches!(r, Err(Error::TooLarge { .. })));
    }

    #[test]
    fn scan_rejects_bad_inputs() {
        assert_eq!(
            power_scan(&p("x1+1", 1), &Polynomial::one(1), 3),
            Err(Error::NotHomogeneous)
        );
        assert_eq!(
            power_scan(&Polynomial::one(2), &Polynomial::one(2), 3),
            Err(Error::ConstantPolynomial)
        );
    }
}
