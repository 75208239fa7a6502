use alloc::vec::Vec;
use core::cmp::Ordering;

/// Exponent vector `I = (I1, ..., In)` of a monomial `x^I`.
///
/// Ordering is graded lexicographic: total degree first, then lexicographic
/// on the exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(nvars: usize) -> Self {
        MultiIndex(alloc::vec![0; nvars])
    }

    /// `power * e_k`.
    pub fn unit(nvars: usize, k: usize, power: u32) -> Self {
        let mut e = alloc::vec![0; nvars];
        e[k] = power;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|I|`.
    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// All exponent vectors of total degree `d` in `n` variables, in canonical
/// (descending graded-lex) order.
pub(crate) fn degree_basis(n: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(MultiIndex(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `C(d + n - 1, n - 1)`, the number of degree-`d` monomials in `n` variables,
/// saturating at `u128::MAX`.
pub(crate) fn basis_size(n: usize, d: u64) -> u128 {
    if n == 0 {
        return if d == 0 { 1 } else { 0 };
    }
    let k = (n - 1) as u128;
    let top = d as u128 + k;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = MultiIndex::new(vec![0, 3]);
        let b = MultiIndex::new(vec![2, 0]);
        let c = MultiIndex::new(vec![1, 2]);
        assert!(b < a);
        assert!(c > a);
        assert!(MultiIndex::new(vec![3, 0]) > a);
    }

    #[test]
    fn basis_matches_binomial() {
        for n in 1..5 {
            for d in 0..6 {
                assert_eq!(degree_basis(n, d).len() as u128, basis_size(n, d as u64));
            }
        }
        let b = degree_basis(2, 2);
        assert_eq!(b[0].exponents(), &[2, 0]);
        assert_eq!(b[2].exponents(), &[0, 2]);
    }
}
