//! Deciders for the three positivity conditions on a nonconstant
//! homogeneous polynomial `p`:
//!
//! - **Pos1**: `p(e_k) > 0` for every standard basis vector.
//! - **Pos2**: `dp/dx_k > 0` on the facet `{x >= 0, x_k = 0}` minus the origin.
//! - **Pos3**: `|p(z)| < p(|z_1|, ..., |z_n|)` for every complex `z` whose
//!   nonzero coordinates do not share a common argument.
//!
//! Each decider returns a [`ConditionReport`]. A `Fails` verdict always
//! carries a witness that [`Witness::recheck`] re-validates independently; a
//! `Holds` verdict always carries a certificate.

mod hermitian;
mod pos3;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::eventual::polya_search;
use crate::poly::{GaussianRational, Interval, MultiIndex, Polynomial, Rational};

pub use hermitian::{assoc_bihom_eval, check_sgcs, hermitian_gram_matrix, max_squared_norm_diag, Sgcs};
pub use pos3::{check_pos3, misalignment, Pos3Mode, Pos3Options, UnresolvedBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Pos1,
    Pos2,
    Pos3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Pos1 => "Pos1",
            Condition::Pos2 => "Pos2",
            Condition::Pos3 => "Pos3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "Holds",
            Verdict::Fails => "Fails",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Evidence attached to a `Holds` verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Exact values `p(e_1), ..., p(e_n)`, all positive.
    UnitValues(Vec<Rational>),
    /// Per facet `k` (0-based) the Pólya exponent `N_k` that makes
    /// `(sum of the other variables)^N_k * g_k` all-positive. Empty for a
    /// single variable, where every facet is just the origin.
    PolyaExponents(Vec<(usize, u32)>),
    Pos3(Pos3Certificate),
}

/// What a `Holds` verdict for Pos3 rests on. The box search covers the
/// normalized domain minus a `delta`-neighbourhood of the aligned set; the
/// neighbourhood itself is backed by sampled `J_f` positive-definiteness,
/// so the certificate is resolution-limited.
#[derive(Clone, Debug, PartialEq)]
pub struct Pos3Certificate {
    pub delta: f64,
    pub max_depth: u32,
    pub depth_reached: u32,
    pub boxes_proved: u64,
    pub boxes_near_aligned: u64,
    pub jf_points: u32,
    pub jf_all_positive_definite: bool,
    pub vacuous: bool,
    pub resolution_limited: bool,
}

/// A point at which a condition is violated.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Pos1: the basis vector `e_k` (0-based `k`) with `p(e_k) <= 0`.
    UnitVector { index: usize, point: Vec<Rational>, value: Rational },
    /// Pos2: a facet point `x` (`x_k = 0`, `x != 0`) with `dp/dx_k(x) <= 0`.
    FacetPoint { facet: usize, point: Vec<Rational>, value: Rational },
    /// Pos3, exact: `z` has Gaussian-rational coordinates with rational
    /// moduli, and `|p(z)| >= p(|z|)` holds exactly.
    ExactComplex {
        z: Vec<GaussianRational>,
        moduli: Vec<Rational>,
        value: GaussianRational,
        bound: Rational,
    },
    /// Pos3, floating: `z = r * e^{i theta}` where an interval evaluation of
    /// `p(r)^2 - |p(z)|^2` (or of `p(r)`) lies strictly below zero.
    FloatComplex {
        r: Vec<f64>,
        theta: Vec<f64>,
        gap: Interval,
    },
}

impl Witness {
    /// Re-validates the witness against `p` without reusing any state from
    /// the search that produced it.
    pub fn recheck(&self, p: &Polynomial) -> Result<bool> {
        match self {
            Witness::UnitVector { point, value, .. } => {
                let v = p.eval_rational(point)?;
                Ok(&v == value && !v.is_positive())
            }
            Witness::FacetPoint { facet, point, value } => {
                if !point[*facet].is_zero() || point.iter().all(|c| c.is_zero()) {
                    return Ok(false);
                }
                let v = p.partial_derivative(*facet)?.eval_rational(point)?;
                Ok(&v == value && !v.is_positive())
            }
            Witness::ExactComplex { z, moduli, .. } => {
                if z.len() != moduli.len() {
                    return Ok(false);
                }
                for (zj, rj) in z.iter().zip(moduli) {
                    if rj.is_negative() || zj.norm_sqr() != rj * rj {
                        return Ok(false);
                    }
                }
                if pos3::gaussian_aligned(z) {
                    return Ok(false);
                }
                let value = p.eval_gaussian(z)?;
                let bound = p.eval_rational(moduli)?;
                Ok(!bound.is_positive() || value.norm_sqr() >= &bound * &bound)
            }
            Witness::FloatComplex { r, theta, .. } => {
                let (gap, base, misalign) = pos3::point_enclosures(p, r, theta)?;
                Ok(misalign.is_positive() && (gap.is_negative() || base.is_negative()))
            }
        }
    }
}

/// Search effort spent on a report.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BudgetUsed {
    pub evaluations: u64,
    pub polya_steps: u64,
    pub boxes: u64,
    pub depth_reached: u32,
    pub refinements: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub witness: Option<Witness>,
    pub budget: BudgetUsed,
    /// Boxes the Pos3 search could not resolve (capped).
    pub unresolved: Vec<UnresolvedBox>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub(crate) fn new(condition: Condition, verdict: Verdict) -> Self {
        ConditionReport {
            condition,
            verdict,
            certificate: None,
            witness: None,
            budget: BudgetUsed::default(),
            unresolved: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// Degree of a nonconstant homogeneous polynomial.
pub(crate) fn check_input(p: &Polynomial) -> Result<u32> {
    let d = p.homogeneous_degree()?;
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    Ok(d)
}

fn unit_point(n: usize, k: usize) -> Vec<Rational> {
    (0..n)
        .map(|i| if i == k { Rational::from_integer(1.into()) } else { Rational::zero() })
        .collect()
}

pub fn check_pos1(p: &Polynomial) -> Result<ConditionReport> {
    let d = check_input(p)?;
    let n = p.nvars();
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        // p(e_k) is the coefficient of x_k^d.
        let v = p.coefficient(&MultiIndex::unit(n, k, d));
        if !v.is_positive() {
            let mut report = ConditionReport::new(Condition::Pos1, Verdict::Fails);
            report.witness = Some(Witness::UnitVector {
                index: k,
                point: unit_point(n, k),
                value: v,
            });
            report.budget.evaluations = k as u64 + 1;
            return Ok(report);
        }
        values.push(v);
    }
    let mut report = ConditionReport::new(Condition::Pos1, Verdict::Holds);
    report.certificate = Some(Certificate::UnitValues(values));
    report.budget.evaluations = n as u64;
    Ok(report)
}

/// `g_k = dp/dx_k` restricted to `x_k = 0`, as a polynomial in the
/// remaining `n - 1` variables (0-based `k`).
pub fn facet_derivative(p: &Polynomial, k: usize) -> Result<Polynomial> {
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    p.partial_derivative(k)?.restrict_to_facet(k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pos2Options {
    pub polya_budget: u32,
    /// Denominator of the exact facet sampling grid.
    pub grid: u32,
    /// Cap on sampled facet points per facet.
    pub max_samples: u64,
}

impl Default for Pos2Options {
    fn default() -> Self {
        Pos2Options {
            polya_budget: 64,
            grid: 32,
            max_samples: 50_000,
        }
    }
}

pub fn check_pos2(p: &Polynomial, polya_budget: u32) -> Result<ConditionReport> {
    check_pos2_with(
        p,
        &Pos2Options {
            polya_budget,
            ..Pos2Options::default()
        },
    )
}

pub fn check_pos2_with(p: &Polynomial, opts: &Pos2Options) -> Result<ConditionReport> {
    check_input(p)?;
    let n = p.nvars();
    let mut budget = BudgetUsed::default();
    if n == 1 {
        let mut report = ConditionReport::new(Condition::Pos2, Verdict::Holds);
        report.certificate = Some(Certificate::PolyaExponents(Vec::new()));
        report
            .notes
            .push("single variable: the facet is the origin, condition is vacuous".into());
        return Ok(report);
    }

    let fail = |facet: usize, sub_point: Vec<Rational>, value: Rational, budget: BudgetUsed| {
        let mut point = sub_point;
        point.insert(facet, Rational::zero());
        let mut report = ConditionReport::new(Condition::Pos2, Verdict::Fails);
        report.witness = Some(Witness::FacetPoint { facet, point, value });
        report.budget = budget;
        report
    };

    let mut exponents = Vec::with_capacity(n);
    let mut undecided = Vec::new();
    for k in 0..n {
        let g = facet_derivative(p, k)?;
        if g.is_zero() {
            let mut report = fail(k, unit_point(n - 1, 0), Rational::zero(), budget);
            report
                .notes
                .push(alloc::format!("facet derivative g_{} is identically zero", k + 1));
            return Ok(report);
        }
        // Vertices of the facet simplex: g(e_j) is the coefficient of x_j^(d-1).
        let dg = g.homogeneous_degree()?;
        for j in 0..n - 1 {
            budget.evaluations += 1;
            let v = g.coefficient(&MultiIndex::unit(n - 1, j, dg));
            if !v.is_positive() {
                return Ok(fail(k, unit_point(n - 1, j), v, budget));
            }
        }
        let search = polya_search(&g, opts.polya_budget)?;
        budget.polya_steps += search.steps as u64;
        match search.exponent {
            Some(e) => exponents.push((k, e)),
            None => undecided.push((k, g)),
        }
    }

    for (k, g) in &undecided {
        if let Some((point, value)) = sample_nonpositive(g, opts, &mut budget)? {
            return Ok(fail(*k, point, value, budget));
        }
    }

    if undecided.is_empty() {
        let mut report = ConditionReport::new(Condition::Pos2, Verdict::Holds);
        report.certificate = Some(Certificate::PolyaExponents(exponents));
        report.budget = budget;
        Ok(report)
    } else {
        let mut report = ConditionReport::new(Condition::Pos2, Verdict::Inconclusive);
        for (k, _) in &undecided {
            report.notes.push(alloc::format!(
                "facet {}: no Polya exponent up to {} and no sampled counterexample",
                k + 1,
                opts.polya_budget
            ));
        }
        report.budget = budget;
        Ok(report)
    }
}

/// Exact search over the rational grid `{x >= 0, sum x = 1, x * grid integral}`.
fn sample_nonpositive(
    g: &Polynomial,
    opts: &Pos2Options,
    budget: &mut BudgetUsed,
) -> Result<Option<(Vec<Rational>, Rational)>> {
    let m = g.nvars();
    let mut grid = opts.grid.max(1);
    while grid > 1 && Polynomial::dense_basis_size(m, grid as u64) > opts.max_samples as u128 {
        grid -= 1;
    }
    let den = Rational::from_integer((grid as i64).into());
    for e in Polynomial::monomial_basis(m, grid) {
        let x: Vec<Rational> = e
            .exponents()
            .iter()
            .map(|&v| Rational::from_integer((v as i64).into()) / &den)
            .collect();
        budget.evaluations += 1;
        let v = g.eval_rational(&x)?;
        if !v.is_positive() {
            return Ok(Some((x, v)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, parse};

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    #[test]
    fn pos1_examples() {
        let pos1_violator = p("(x1+x2+x3)^3 - x1^3", 3);
        let r = check_pos1(&pos1_violator).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        match r.witness.as_ref().unwrap() {
            Witness::UnitVector { index, value, .. } => {
                assert_eq!(*index, 0);
                assert_eq!(value, &int(0));
            }
            w => panic!("unexpected witness {:?}", w),
        }
        assert!(r.witness.unwrap().recheck(&pos1_violator).unwrap());

        let r = check_pos1(&p("x1+x2", 2)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.certificate, Some(Certificate::UnitValues(alloc::vec![int(1), int(1)])));
        let r = check_pos1(&p("(x1+x2)^4 - 7*x1^2*x2^2", 2)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn pos1_rejects_bad_input() {
        assert_eq!(check_pos1(&p("x1 + 1", 1)).unwrap_err(), Error::NotHomogeneous);
        assert_eq!(check_pos1(&p("3", 2)).unwrap_err(), Error::ConstantPolynomial);
    }

    #[test]
    fn facet_derivatives() {
        let pos2_violator = p("x1^2*(x1+x2+x3) + (x2+x3)^3", 3);
        assert!(facet_derivative(&pos2_violator, 0).unwrap().is_zero());
        assert_eq!(facet_derivative(&p("(x1+x2)^2", 2), 0).unwrap(), p("2*x1", 1));
        let p7 = p("(x1+x2)^4 - 7*x1^2*x2^2", 2);
        assert_eq!(facet_derivative(&p7, 0).unwrap(), p("4*x1^3", 1));
        assert!(facet_derivative(&p7, 2).is_err());
    }

    #[test]
    fn pos2_examples() {
        let pos2_violator = p("x1^2*(x1+x2+x3) + (x2+x3)^3", 3);
        let r = check_pos2(&pos2_violator, 20).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        match r.witness.as_ref().unwrap() {
            Witness::FacetPoint { facet, value, .. } => {
                assert_eq!(*facet, 0);
                assert!(value.is_zero());
            }
            w => panic!("unexpected witness {:?}", w),
        }
        assert!(r.witness.unwrap().recheck(&pos2_violator).unwrap());

        let p7 = p("(x1+x2)^4 - 7*x1^2*x2^2", 2);
        let r = check_pos2(&p7, 20).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(
            r.certificate,
            Some(Certificate::PolyaExponents(alloc::vec![(0, 0), (1, 0)]))
        );
    }

    #[test]
    fn pos2_sampling_finds_interior_zero() {
        // g_1 = (x2 - x3)^2 vanishes at (0, 1/2, 1/2) but not at the vertices.
        let f = p("x1*(x2-x3)^2 + x2^3 + x3^3", 3);
        let r = check_pos2(&f, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.unwrap().recheck(&f).unwrap());
    }

    #[test]
    fn pos2_single_variable_is_vacuous() {
        let r = check_pos2(&p("2*x1^3", 1), 4).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }
}
