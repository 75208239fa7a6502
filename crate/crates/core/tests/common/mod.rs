#![allow(dead_code)]

use eventpos::poly::ratio;
use eventpos::{MultiIndex, Polynomial, Rational};
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

pub fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=30, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(rational(), n)
}

pub fn positive_point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(positive_rational(), n)
}

fn build(n: usize, d: u32, picks: Vec<Option<Rational>>) -> Polynomial {
    let terms = Polynomial::monomial_basis(n, d)
        .into_iter()
        .zip(picks)
        .filter_map(|(e, c)| c.map(|c| (e, c)));
    Polynomial::from_terms(n, terms).unwrap()
}

fn basis_len(n: usize, d: u32) -> usize {
    Polynomial::monomial_basis(n, d).len()
}

/// Homogeneous, possibly sparse, possibly zero, with signed coefficients.
pub fn homogeneous(n: std::ops::RangeInclusive<usize>, d: std::ops::RangeInclusive<u32>) -> impl Strategy<Value = Polynomial> {
    (n, d).prop_flat_map(|(n, d)| {
        proptest::collection::vec(proptest::option::weighted(0.6, rational()), basis_len(n, d))
            .prop_map(move |picks| build(n, d, picks))
    })
}

/// Homogeneous with every monomial of the basis present and positive.
pub fn all_positive(n: std::ops::RangeInclusive<usize>, d: std::ops::RangeInclusive<u32>) -> impl Strategy<Value = Polynomial> {
    (n, d).prop_flat_map(|(n, d)| {
        proptest::collection::vec(positive_rational().prop_map(Some), basis_len(n, d))
            .prop_map(move |picks| build(n, d, picks))
    })
}

/// Not necessarily homogeneous, small total degree.
pub fn polynomial(n: usize) -> impl Strategy<Value = Polynomial> {
    let exps = proptest::collection::vec(0u32..=3, n);
    proptest::collection::vec((exps, rational()), 0..6).prop_map(move |terms| {
        Polynomial::from_terms(n, terms.into_iter().map(|(e, c)| (MultiIndex::new(e), c))).unwrap()
    })
}
