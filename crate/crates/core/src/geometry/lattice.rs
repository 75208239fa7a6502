//! Smith normal form over the integers, for the small generator matrices of
//! difference lattices.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Invariant factors (positive, each dividing the next) of an integer matrix
/// given by rows. The number of factors is the rank.
pub fn invariant_factors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    let mut factors = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if a[bi][bj].abs() <= v.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let (pi, pj) = match best {
            Some(b) => b,
            None => break,
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            let mut changed = false;
            // Clear column t below the pivot.
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let delta = &q * &a[t][j];
                    a[i][j] -= delta;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    changed = true;
                }
            }
            // Clear row t right of the pivot.
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let delta = &q * &row[t];
                    row[j] -= delta;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Divisibility: fold any row whose entries the pivot does not divide.
            let pivot = a[t][t].clone();
            let mut offender = None;
            'search: for i in t + 1..m {
                for j in t + 1..n {
                    if !a[i][j].is_multiple_of(&pivot) {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    for j in t..n {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        factors.push(a[t][t].abs());
        t += 1;
    }
    factors
}

/// Rank over the rationals.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    invariant_factors(rows).len()
}

/// True when the rows generate all of `Z^dim`.
pub fn generates_full_lattice(rows: &[Vec<BigInt>], dim: usize) -> bool {
    let f = invariant_factors(rows);
    f.len() == dim && f.iter().all(|v| v.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn classic_snf() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(
            invariant_factors(&a),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }

    #[test]
    fn parity_sublattice_is_not_full() {
        let a = m(&[&[2, 0], &[0, 2], &[2, -2]]);
        assert!(!generates_full_lattice(&a, 2));
        let b = m(&[&[2, 0], &[3, 0], &[0, 1]]);
        assert!(generates_full_lattice(&b, 2));
    }

    #[test]
    fn rank_of_collinear_rows() {
        assert_eq!(rank(&m(&[&[1, 0], &[3, 0]])), 1);
        assert_eq!(rank(&m(&[&[0, 0]])), 0);
    }
}
