mod common;

use common::{homogeneous, point, polynomial, positive_rational};
use eventpos::poly::{parse, to_f64};
use eventpos::{Interval, Polynomial, Rational};
use num_traits::pow;
use proptest::prelude::*;

proptest! {
    #[test]
    fn ring_axioms(a in polynomial(3), b in polynomial(3), c in polynomial(3)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn pow_adds_exponents(p in polynomial(2), a in 0u32..=6, b in 0u32..=6) {
        prop_assert_eq!(p.pow(a + b), &p.pow(a) * &p.pow(b));
    }

    #[test]
    fn eval_commutes_with_pow(p in polynomial(3), x in point(3), m in 0u32..=5) {
        let v = p.eval_rational(&x).unwrap();
        prop_assert_eq!(p.pow(m).eval_rational(&x).unwrap(), pow(v, m as usize));
    }

    #[test]
    fn homogeneous_scaling(p in homogeneous(1..=4, 0..=5), x in point(4), t in positive_rational()) {
        let n = p.nvars();
        let d = p.homogeneous_degree().unwrap_or(0);
        let x = &x[..n];
        let tx: Vec<Rational> = x.iter().map(|c| c * &t).collect();
        let lhs = p.eval_rational(&tx).unwrap();
        let rhs = pow(t, d as usize) * p.eval_rational(x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn serialize_parse_round_trip(p in polynomial(4)) {
        prop_assert_eq!(parse(&p.serialize(), 4).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interval_eval_encloses_exact(
        p in polynomial(3),
        x in point(3),
        widths in proptest::collection::vec((0.0f64..2.0, 0.0f64..2.0), 3),
    ) {
        let bx: Vec<Interval> = x
            .iter()
            .zip(&widths)
            .map(|(c, (l, h))| {
                let m = to_f64(c);
                Interval::from_rational(c).hull(&Interval::new(m - l, m + h))
            })
            .collect();
        let exact = to_f64(&p.eval_rational(&x).unwrap());
        let iv = p.eval_interval(&bx).unwrap();
        prop_assert!(iv.lo() <= exact && exact <= iv.hi(), "{} not in {}", exact, iv);
    }
}

#[test]
fn grammar_examples() {
    let p = parse("(x1+x2)^3 - x1^3", 2).unwrap();
    assert_eq!(p.degree().finite(), Some(3));
    assert!(p.is_homogeneous());
    assert_eq!(p.serialize(), "3*x1^2*x2 + 3*x1*x2^2 + x2^3");
    assert!(!parse("s1+s2+1", 2).unwrap().is_homogeneous());
    assert_eq!(Polynomial::zero(2).degree().finite(), None);
}
