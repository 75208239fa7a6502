mod common;

use std::collections::BTreeMap;

use common::{all_positive, homogeneous, positive_point};
use eventpos::eventual::{all_coeffs_positive, polya_exponent, power_scan, PositivityPattern};
use eventpos::poly::{int, parse};
use eventpos::{Polynomial, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

type Dense = BTreeMap<Vec<u32>, Rational>;

fn to_map(p: &Polynomial) -> Dense {
    p.terms().map(|(e, c)| (e.exponents().to_vec(), c.clone())).collect()
}

fn convolve(a: &Dense, b: &Dense) -> Dense {
    let mut out = Dense::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .flat_map(|k| {
            exponents(n - 1, d - k).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

/// `(all_positive, num_terms, min_coef)` of `p^m * q` for each `m`, by
/// repeated schoolbook convolution.
fn oracle(p: &Polynomial, q: &Polynomial, max_m: u32) -> Vec<(bool, usize, Rational)> {
    let n = p.nvars();
    let dp = p.degree().finite().unwrap();
    let dq = q.degree().finite().unwrap();
    let pm = to_map(p);
    let mut cur = to_map(q);
    let mut out = Vec::new();
    for m in 0..=max_m {
        if m > 0 {
            cur = convolve(&cur, &pm);
        }
        let basis = exponents(n, m * dp + dq);
        let min = basis
            .iter()
            .map(|e| cur.get(e).cloned().unwrap_or_else(Rational::zero))
            .min()
            .unwrap();
        out.push((min.is_positive(), cur.len(), min));
    }
    out
}

fn check_onset(pat: &PositivityPattern) -> Result<(), TestCaseError> {
    let flags = pat.flags();
    if let Some(o) = pat.onset {
        prop_assert!(flags[o as usize..].iter().all(|f| *f));
        prop_assert!(o == 0 || !flags[o as usize - 1]);
        prop_assert!(pat.first_true.unwrap() <= o);
    } else {
        prop_assert!(!flags.last().unwrap());
    }
    prop_assert_eq!(pat.first_true, flags.iter().position(|f| *f).map(|m| m as u32));
    Ok(())
}

fn nonzero(p: Polynomial) -> bool {
    !p.is_zero() && p.degree().finite() != Some(0)
}

proptest! {
    #[test]
    fn scan_matches_convolution(
        p in homogeneous(1..=3, 1..=3).prop_filter("nonconstant", |p| nonzero(p.clone())),
        qd in 0u32..=2,
        seed in any::<u64>(),
    ) {
        let n = p.nvars();
        let q = if seed % 3 == 0 {
            Polynomial::one(n)
        } else {
            let basis = Polynomial::monomial_basis(n, qd);
            let terms = basis.into_iter().enumerate().map(|(i, e)| {
                (e, int(((seed >> (i % 60)) % 7) as i64 - 2))
            });
            let q = Polynomial::from_terms(n, terms).unwrap();
            if q.is_zero() { Polynomial::one(n) } else { q }
        };
        let pat = power_scan(&p, &q, 4).unwrap();
        let expect = oracle(&p, &q, 4);
        for (s, (pos, terms, min)) in pat.steps.iter().zip(&expect) {
            prop_assert_eq!(s.all_positive, *pos, "m = {}", s.m);
            prop_assert_eq!(s.num_terms, *terms, "m = {}", s.m);
            prop_assert_eq!(&s.min_coef, min, "m = {}", s.m);
        }
        check_onset(&pat)?;
    }

    #[test]
    fn all_positive_base_absorbs(p in all_positive(1..=3, 1..=3), q in homogeneous(1..=3, 0..=3)) {
        prop_assume!(p.nvars() == q.nvars() && !q.is_zero());
        let flags = power_scan(&p, &q, 6).unwrap().flags();
        for w in flags.windows(2) {
            prop_assert!(!w[0] || w[1]);
        }
    }

    #[test]
    fn flags_agree_with_direct_powers(p in homogeneous(2..=3, 1..=3).prop_filter("nonconstant", |p| nonzero(p.clone())), m in 0u32..=4) {
        let pat = power_scan(&p, &Polynomial::one(p.nvars()), m).unwrap();
        prop_assert_eq!(pat.flags()[m as usize], all_coeffs_positive(&p.pow(m)).unwrap());
    }

    #[test]
    fn polya_exponent_implies_positivity(g in homogeneous(2..=3, 1..=3), pts in proptest::collection::vec(positive_point(3), 100)) {
        prop_assume!(nonzero(g.clone()));
        if polya_exponent(&g, 30).unwrap().is_some() {
            for x in &pts {
                prop_assert!(g.eval_rational(&x[..g.nvars()]).unwrap().is_positive());
            }
        }
    }
}

#[test]
fn polya_examples() {
    let g = parse("x1^2 - x1*x2 + x2^2", 2).unwrap();
    assert_eq!(polya_exponent(&g, 10).unwrap(), Some(3));
    assert_eq!(polya_exponent(&parse("x1^2 + x1*x2 + x2^2", 2).unwrap(), 10).unwrap(), Some(0));
    assert_eq!(polya_exponent(&parse("-x1", 2).unwrap(), 10).unwrap(), None);
    let pat = power_scan(&parse("x1+x2", 2).unwrap(), &g, 10).unwrap();
    assert_eq!(pat.onset, Some(3));
    assert_eq!(pat.flags()[..4], [false, false, false, true]);
}

#[test]
fn dv_family_coefficients() {
    let p = parse("(x1+x2)^4 - 7*x1^2*x2^2", 2).unwrap();
    let one = Polynomial::one(2);
    let orc = |m: u32| {
        let mut cur = to_map(&one);
        for _ in 0..m {
            cur = convolve(&cur, &to_map(&p));
        }
        cur
    };
    assert_eq!(orc(2).get(&vec![5, 3]).cloned().unwrap_or_else(Rational::zero), int(0));
    assert_eq!(orc(3)[&vec![6, 6]], int(-7));
    assert_eq!(p.pow(2).coefficient(&vec![5, 3].into()), int(0));
    assert_eq!(p.pow(3).coefficient(&vec![6, 6].into()), int(-7));
    let pat = power_scan(&p, &one, 60).unwrap();
    assert!(!pat.flags()[2] && !pat.flags()[3]);
    assert!(pat.onset.is_some());
    assert_eq!(Rational::one(), int(1));
}

#[test]
fn failing_examples_have_no_onset() {
    for (s, n) in [
        ("(x1+x2+x3)^3 - x1^3", 3),
        ("x1^2*(x1+x2+x3) + (x2+x3)^3", 3),
        ("(x1+x2)^4 - 8*x1^2*x2^2", 2),
    ] {
        let p = parse(s, n).unwrap();
        let pat = power_scan(&p, &Polynomial::one(n), 60).unwrap();
        assert_eq!(pat.onset, None, "{}", s);
        assert!(pat.flags()[1..].iter().all(|f| !f), "{}", s);
    }
}

#[test]
fn size_cap_is_enforced() {
    let p = parse("x1+x2+x3+x4+x5+x6", 6).unwrap();
    assert!(power_scan(&p, &Polynomial::one(6), 200).is_err());
}
