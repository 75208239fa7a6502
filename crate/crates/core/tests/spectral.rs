mod common;

use common::positive_point;
use eventpos::conditions::{check_pos1, check_pos2, check_pos3, Pos3Options, Verdict};
use eventpos::poly::{int, parse, to_f64};
use eventpos::spectral::{
    beta_at, charpoly_residual, is_aperiodic, is_irreducible, perron, verify_beta, BetaVerdict,
    PolyMatrix,
};
use eventpos::{MultiIndex, Polynomial, Rational};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Linear forms in two variables with coefficients in `0..=3`.
fn linear_entry() -> impl Strategy<Value = Polynomial> {
    (0i64..=3, 0i64..=3).prop_map(|(a, b)| {
        Polynomial::from_terms(
            2,
            [(MultiIndex::new(vec![1, 0]), int(a)), (MultiIndex::new(vec![0, 1]), int(b))],
        )
        .unwrap()
    })
}

fn linear_matrix() -> impl Strategy<Value = PolyMatrix> {
    (1usize..=3).prop_flat_map(|k| {
        proptest::collection::vec(proptest::collection::vec(linear_entry(), k), k)
            .prop_map(|rows| PolyMatrix::new(rows).unwrap())
    })
}

fn scale(x: &[Rational], t: &Rational) -> Vec<Rational> {
    x.iter().map(|v| v * t).collect()
}

proptest! {
    #[test]
    fn beta_is_homogeneous_of_degree_one(a in linear_matrix(), x in positive_point(2), t in 1i64..=20) {
        let t = Rational::new(t.into(), 3.into());
        let base = beta_at(&a, &x, 1e-12).unwrap();
        let scaled = beta_at(&a, &scale(&x, &t), 1e-12).unwrap();
        let expect = to_f64(&t) * base;
        prop_assert!((scaled - expect).abs() <= 1e-8 * expect.max(1.0), "{} vs {}", scaled, expect);
    }

    #[test]
    fn collatz_wielandt_sandwich(a in linear_matrix(), x in positive_point(2)) {
        prop_assume!(is_irreducible(&a));
        let r = perron(&a, &x, 1e-12).unwrap();
        let k = a.dim();
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        let m = a.eval_f64(&xf).unwrap();
        let ratios: Vec<f64> = (0..k)
            .filter(|&i| r.vector[i] > 0.0)
            .map(|i| (0..k).map(|j| m[i * k + j] * r.vector[j]).sum::<f64>() / r.vector[i])
            .collect();
        prop_assert_eq!(ratios.len(), k);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-9 * r.value.max(1.0);
        prop_assert!(lo - slack <= r.value && r.value <= hi + slack, "{} not in [{}, {}]", r.value, lo, hi);
        prop_assert!(r.lower <= r.value && r.value <= r.upper);
    }

    #[test]
    fn two_by_two_matches_closed_forms(
        (a, b, c, d) in (linear_entry(), linear_entry(), linear_entry(), linear_entry()),
        x in positive_point(2),
    ) {
        let m = PolyMatrix::new(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]).unwrap();
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        let [av, bv, cv, dv] = [&a, &b, &c, &d].map(|e| e.eval_f64(&xf).unwrap());
        let rho = (av + dv) / 2.0 + (((av - dv) / 2.0).powi(2) + bv * cv).sqrt();
        let got = beta_at(&m, &x, 1e-12).unwrap();
        prop_assert!((got - rho).abs() <= 1e-8 * rho.max(1.0), "{} vs {}", got, rho);

        let p = &a + &d;
        let expect = &(&(&p - &a) * &(&p - &d)) - &(&b * &c);
        prop_assert_eq!(charpoly_residual(&m, &p).unwrap(), expect);
    }
}

fn matrix(rows: &[&[&str]]) -> PolyMatrix {
    PolyMatrix::new(
        rows.iter()
            .map(|r| r.iter().map(|e| parse(e, 2).unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

#[test]
fn symmetric_pair_is_verified() {
    let a = matrix(&[&["x1", "x2"], &["x2", "x1"]]);
    let p = parse("x1+x2", 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let r = verify_beta(&a, &p, 20, 1e-9, &mut rng).unwrap();
    assert_eq!(r.verdict, BetaVerdict::Verified);
    assert_eq!(r.exact_charpoly_zero, Some(true));
    assert_eq!(r.samples.len(), 20);
    assert!(r.samples.iter().all(|s| s.agrees));
}

#[test]
fn cyclic_pair_is_refuted() {
    let a = matrix(&[&["0", "x1"], &["x2", "0"]]);
    assert!(is_irreducible(&a));
    assert!(!is_aperiodic(&a));
    for p in ["x1", "x2", "x1+x2", "2*x1 + 3*x2"] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = verify_beta(&a, &parse(p, 2).unwrap(), 20, 1e-9, &mut rng).unwrap();
        assert_eq!(r.verdict, BetaVerdict::Refuted, "{}", p);
        assert_eq!(r.exact_charpoly_zero, Some(false));
    }
}

#[test]
fn verified_pairs_pass_pos3_falsification() {
    let a = matrix(&[&["x1", "x2"], &["x2", "x1"]]);
    let p = parse("x1+x2", 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert_eq!(verify_beta(&a, &p, 10, 1e-9, &mut rng).unwrap().verdict, BetaVerdict::Verified);
    assert_eq!(check_pos1(&p).unwrap().verdict, Verdict::Holds);
    assert_eq!(check_pos2(&p, 16).unwrap().verdict, Verdict::Holds);
    assert_ne!(check_pos3(&p, &Pos3Options::falsify()).unwrap().verdict, Verdict::Fails);
}

#[test]
fn power_certificates_round_trip() {
    for (s, m) in [("x1+x2", 1), ("(x1+x2)^4 - 7*x1^2*x2^2", 4)] {
        let p = parse(s, 2).unwrap();
        let pm = p.pow(m);
        let b = PolyMatrix::single(pm.clone()).unwrap();
        assert!(is_irreducible(&b) && is_aperiodic(&b));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = verify_beta(&b, &pm, 20, 1e-9, &mut rng).unwrap();
        assert_eq!(r.verdict, BetaVerdict::Verified, "{}", s);
    }
}
