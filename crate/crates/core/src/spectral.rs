//! Square matrices over `Z_+[x_1, ..., x_n]`, their support digraphs and the
//! Perron root function `beta_A(x) = rho(A(x))` on the open orthant.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::poly::{to_f64, Polynomial, Rational};

/// Largest dimension accepted by [`charpoly_residual`].
pub const MAX_DET_DIM: usize = 8;
/// Power-iteration cap in [`perron`].
pub const MAX_ITERATIONS: usize = 200_000;

/// A `dim x dim` matrix whose entries have nonnegative integer coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    dim: usize,
    nvars: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix must be at least 1x1".into()));
        }
        let nvars = rows[0].first().map(|p| p.nvars()).unwrap_or(0);
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (j, p) in row.into_iter().enumerate() {
                if p.nvars() != nvars {
                    return Err(Error::NvarsMismatch {
                        left: nvars,
                        right: p.nvars(),
                    });
                }
                let ok = p.terms().all(|(_, c)| c.is_integer() && !c.is_negative());
                if !ok {
                    return Err(Error::BadMatrixEntry { row: i, col: j });
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix { dim, nvars, entries })
    }

    /// The `1 x 1` matrix `(p)`.
    pub fn single(p: Polynomial) -> Result<Self> {
        PolyMatrix::new(vec![vec![p]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.dim + j]
    }

    /// Adjacency lists of the support digraph: `i -> j` iff `A_ij != 0`.
    pub fn support_graph(&self) -> Vec<Vec<usize>> {
        (0..self.dim)
            .map(|i| (0..self.dim).filter(|&j| !self.entry(i, j).is_zero()).collect())
            .collect()
    }

    /// `A(x)` in double precision, row-major.
    pub fn eval_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.entries.iter().map(|p| p.eval_f64(x)).collect()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

fn components(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<(), ()>::with_capacity(graph.len(), 0);
    for _ in graph {
        g.add_node(());
    }
    for (i, out) in graph.iter().enumerate() {
        for &j in out {
            g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Gcd of closed-walk lengths inside one component, or 0 when it has no
/// cycle at all.
fn period(graph: &[Vec<usize>], comp: &[usize]) -> usize {
    let n = graph.len();
    let mut inside = vec![false; n];
    for &v in comp {
        inside[v] = true;
    }
    let mut level = vec![usize::MAX; n];
    level[comp[0]] = 0;
    let mut queue = alloc::collections::VecDeque::from([comp[0]]);
    let mut g = 0usize;
    while let Some(u) = queue.pop_front() {
        for &v in &graph[u] {
            if !inside[v] {
                continue;
            }
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = g.gcd(&(level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g
}

/// Whether the support digraph is strongly connected. A `1 x 1` matrix is
/// irreducible iff its entry is nonzero.
pub fn is_irreducible(a: &PolyMatrix) -> bool {
    let graph = a.support_graph();
    if a.dim == 1 {
        return !graph[0].is_empty();
    }
    components(&graph).len() == 1
}

/// Whether every node lies on closed walks whose lengths have gcd 1.
pub fn is_aperiodic(a: &PolyMatrix) -> bool {
    let graph = a.support_graph();
    components(&graph).iter().all(|c| period(&graph, c) == 1)
}

/// Perron root of `A(x)` with its Collatz-Wielandt bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct Perron {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Nonnegative, max-normalized; supported on the dominant component.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// `rho(A(x))` to within `tol * max(1, rho)`.
pub fn beta_at(a: &PolyMatrix, x: &[Rational], tol: f64) -> Result<f64> {
    Ok(perron(a, x, tol)?.value)
}

/// Power iteration on `A(x) + I` restricted to each strongly connected
/// component; the largest component root wins.
pub fn perron(a: &PolyMatrix, x: &[Rational], tol: f64) -> Result<Perron> {
    let m = evaluate(a, x)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let graph = a.support_graph();
    let n = a.dim;
    let mut best = Perron {
        value: 0.0,
        lower: 0.0,
        upper: 0.0,
        vector: vec![0.0; n],
        iterations: 0,
    };
    best.vector[0] = 1.0;
    for comp in components(&graph) {
        if period(&graph, &comp) == 0 {
            continue;
        }
        let r = block_perron(&m, n, &comp, tol)?;
        if r.value > best.value {
            best = r;
        }
    }
    Ok(best)
}

fn evaluate(a: &PolyMatrix, x: &[Rational]) -> Result<Vec<f64>> {
    if x.len() != a.nvars {
        return Err(Error::DimensionMismatch {
            expected: a.nvars,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_positive()) {
        return Err(Error::NonPositive("beta_A needs an interior point".into()));
    }
    let xf: Vec<f64> = x.iter().map(to_f64).collect();
    a.eval_f64(&xf)
}

fn block_perron(m: &[f64], n: usize, comp: &[usize], tol: f64) -> Result<Perron> {
    let k = comp.len();
    let sub = |i: usize, j: usize| m[comp[i] * n + comp[j]];
    let mut v = vec![1.0; k];
    let mut w = vec![0.0; k];
    for it in 1..=MAX_ITERATIONS {
        for i in 0..k {
            w[i] = v[i] + (0..k).map(|j| sub(i, j) * v[j]).sum::<f64>();
        }
        if it >= k {
            let mut lower = f64::INFINITY;
            let mut upper = 0.0;
            for i in 0..k {
                let q = w[i] / v[i];
                lower = f64::min(lower, q);
                upper = f64::max(upper, q);
            }
            lower -= 1.0;
            upper -= 1.0;
            let width = upper - lower;
            let stalled = width <= 16.0 * f64::EPSILON * (1.0 + upper.abs());
            if width <= tol * upper.max(1.0) || stalled {
                let mut vector = vec![0.0; n];
                let top = w.iter().cloned().fold(0.0, f64::max);
                for (i, &c) in comp.iter().enumerate() {
                    vector[c] = w[i] / top;
                }
                return Ok(Perron {
                    value: 0.5 * (lower + upper),
                    lower,
                    upper,
                    vector,
                    iterations: it,
                });
            }
        }
        let top = w.iter().cloned().fold(0.0, f64::max);
        if !(top > 0.0) || !top.is_finite() {
            return Err(Error::NoConvergence { iterations: it });
        }
        for i in 0..k {
            v[i] = w[i] / top;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// All eigenvalues of a dense real matrix: Faddeev-LeVerrier for the
/// characteristic polynomial, then Aberth iteration for its roots.
fn eigenvalues(m: &[f64], n: usize) -> Vec<Complex64> {
    let mut coef = vec![1.0; n + 1];
    let mut mk = vec![0.0; n * n];
    let mut am = vec![0.0; n * n];
    for k in 1..=n {
        // mk <- A * mk_prev + c_{k-1} I
        for i in 0..n {
            for j in 0..n {
                let prev = if k == 1 { 0.0 } else { am[i * n + j] };
                mk[i * n + j] = prev + if i == j { coef[k - 1] } else { 0.0 };
            }
        }
        for i in 0..n {
            for j in 0..n {
                am[i * n + j] = (0..n).map(|l| m[i * n + l] * mk[l * n + j]).sum();
            }
        }
        let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
        coef[k] = -trace / k as f64;
    }
    // t^n + coef[1] t^{n-1} + ... + coef[n]
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::zero();
        for &c in &coef[1..] {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let radius = 1.0 + coef[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + core::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(roots[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (roots[k] - roots[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                roots[k] -= step;
                moved = moved.max(step.norm() / (1.0 + roots[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

/// `rho - |lambda_2|` where `lambda_2` is the eigenvalue of largest modulus
/// once one copy of the Perron root is removed.
fn modulus_gap(m: &[f64], n: usize, rho: f64) -> f64 {
    if n == 1 {
        return rho;
    }
    let mut ev = eigenvalues(m, n);
    let (pos, _) = ev
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z - Complex64::new(rho, 0.0)).norm()))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    ev.swap_remove(pos);
    let second = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    rho - second
}

/// `det(p I - A)`, expanded exactly.
pub fn charpoly_residual(a: &PolyMatrix, p: &Polynomial) -> Result<Polynomial> {
    if p.nvars() != a.nvars {
        return Err(Error::NvarsMismatch {
            left: a.nvars,
            right: p.nvars(),
        });
    }
    let n = a.dim;
    if n > MAX_DET_DIM {
        return Err(Error::TooLarge {
            what: "matrix dimension",
            size: n as u128,
            cap: MAX_DET_DIM as u128,
        });
    }
    let entry = |i: usize, j: usize| -> Polynomial {
        if i == j {
            p - a.entry(i, j)
        } else {
            -a.entry(i, j)
        }
    };
    // minors[S] = det of rows 0..|S| against the column set S
    let mut minors: Vec<Polynomial> = vec![Polynomial::zero(a.nvars); 1 << n];
    minors[0] = Polynomial::one(a.nvars);
    for set in 1usize..(1 << n) {
        let row = set.count_ones() as usize - 1;
        let mut acc = Polynomial::zero(a.nvars);
        for j in 0..n {
            if set & (1 << j) == 0 {
                continue;
            }
            let rest = &minors[set & !(1 << j)];
            if rest.is_zero() {
                continue;
            }
            let e = entry(row, j);
            if e.is_zero() {
                continue;
            }
            let term = &e * rest;
            let above = (set >> (j + 1)).count_ones();
            acc = if above % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        minors[set] = acc;
    }
    Ok(minors.pop().unwrap_or_else(|| Polynomial::zero(a.nvars)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaVerdict {
    Verified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for BetaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaVerdict::Verified => "Verified",
            BetaVerdict::Refuted => "Refuted",
            BetaVerdict::Inconclusive => "Inconclusive",
        })
    }
}

/// One sampled point. `perron_value` and `gap_to_second_modulus` are `None`
/// when power iteration did not converge.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaSample {
    pub point: Vec<Rational>,
    pub p_value: f64,
    pub perron_value: Option<f64>,
    pub gap_to_second_modulus: Option<f64>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaReport {
    pub irreducible: bool,
    pub aperiodic: bool,
    /// `None` when the matrix is too large for the exact determinant.
    pub exact_charpoly_zero: Option<bool>,
    pub residual: Option<Polynomial>,
    pub samples: Vec<BetaSample>,
    pub verdict: BetaVerdict,
    /// Whether `p` has integer coefficients.
    pub integral: bool,
}

/// Random positive rational point with numerators in `1..=64` over
/// denominators in `1..=16`.
pub fn random_positive_point<R: Rng + ?Sized>(nvars: usize, rng: &mut R) -> Vec<Rational> {
    (0..nvars)
        .map(|_| {
            let num: i64 = rng.random_range(1..=64);
            let den: i64 = rng.random_range(1..=16);
            Rational::new(num.into(), den.into())
        })
        .collect()
}

/// Checks `p = beta_A` exactly through `det(p I - A) = 0` and numerically at
/// `samples` random points, where agreement means
/// `|p(x) - beta_A(x)| <= tol * (1 + |p(x)|)`.
pub fn verify_beta<R: Rng + ?Sized>(
    a: &PolyMatrix,
    p: &Polynomial,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<BetaReport> {
    if p.nvars() != a.nvars {
        return Err(Error::NvarsMismatch {
            left: a.nvars,
            right: p.nvars(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let irreducible = is_irreducible(a);
    let aperiodic = is_aperiodic(a);
    let residual = match charpoly_residual(a, p) {
        Ok(r) => Some(r),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let exact = residual.as_ref().map(|r| r.is_zero());

    let points: Vec<Vec<Rational>> = (0..samples)
        .map(|_| random_positive_point(a.nvars, rng))
        .collect();
    let inner_tol = tol * 0.25;
    let results = crate::par::map(&points, |x| sample(a, p, x, tol, inner_tol));
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;

    let all_converged = samples.iter().all(|s| s.perron_value.is_some());
    let mismatch = samples.iter().any(|s| s.perron_value.is_some() && !s.agrees);
    let verdict = if !irreducible && !aperiodic {
        BetaVerdict::Inconclusive
    } else if exact == Some(false) || mismatch {
        BetaVerdict::Refuted
    } else if exact == Some(true) && all_converged && !samples.is_empty() {
        BetaVerdict::Verified
    } else {
        BetaVerdict::Inconclusive
    };
    Ok(BetaReport {
        irreducible,
        aperiodic,
        exact_charpoly_zero: exact,
        residual,
        samples,
        verdict,
        integral: p.has_integer_coefficients(),
    })
}

fn sample(a: &PolyMatrix, p: &Polynomial, x: &[Rational], tol: f64, inner: f64) -> Result<BetaSample> {
    let p_value = to_f64(&p.eval_rational(x)?);
    let (perron_value, gap) = match perron(a, x, inner) {
        Ok(r) => {
            let m = evaluate(a, x)?;
            (Some(r.value), Some(modulus_gap(&m, a.dim, r.value)))
        }
        Err(Error::NoConvergence { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let agrees = perron_value
        .map(|b| (p_value - b).abs() <= tol * (1.0 + p_value.abs()))
        .unwrap_or(false);
    Ok(BetaSample {
        point: x.to_vec(),
        p_value,
        perron_value,
        gap_to_second_modulus: gap,
        agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, parse};
    use rand::SeedableRng;

    fn mat(rows: &[&[&str]], n: usize) -> PolyMatrix {
        PolyMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|s| parse(s, n).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_entries() {
        let neg = PolyMatrix::new(vec![vec![parse("x1 - x2", 2).unwrap()]]);
        assert_eq!(neg, Err(Error::BadMatrixEntry { row: 0, col: 0 }));
        let frac = PolyMatrix::single(Polynomial::constant(1, crate::poly::ratio(1, 2)));
        assert!(frac.is_err());
        assert!(PolyMatrix::new(vec![]).is_err());
    }

    #[test]
    fn digraph_properties() {
        let swap = mat(&[&["0", "x1"], &["x2", "0"]], 2);
        assert!(is_irreducible(&swap));
        assert!(!is_aperiodic(&swap));
        let tri = mat(&[&["x1", "x2"], &["0", "x1"]], 2);
        assert!(!is_irreducible(&tri));
        let sym = mat(&[&["x1", "x2"], &["x2", "x1"]], 2);
        assert!(is_irreducible(&sym) && is_aperiodic(&sym));
        let one = mat(&[&["(x1+x2)^3"]], 2);
        assert!(is_irreducible(&one) && is_aperiodic(&one));
        let zero = mat(&[&["0"]], 2);
        assert!(!is_irreducible(&zero) && !is_aperiodic(&zero));
        let cycle3 = mat(&[&["0", "x1", "0"], &["0", "0", "x1"], &["x1", "0", "0"]], 1);
        assert!(!is_aperiodic(&cycle3));
        let mixed = mat(&[&["0", "x1", "x1"], &["0", "0", "x1"], &["x1", "0", "0"]], 1);
        assert!(is_aperiodic(&mixed));
    }

    #[test]
    fn perron_roots() {
        let x = [int(1), int(2)];
        assert!((beta_at(&mat(&[&["x1+x2"]], 2), &x, 1e-12).unwrap() - 3.0).abs() < 1e-10);
        let sym = mat(&[&["x1", "x2"], &["x2", "x1"]], 2);
        assert!((beta_at(&sym, &x, 1e-12).unwrap() - 3.0).abs() < 1e-10);
        let swap = mat(&[&["0", "x1"], &["x2", "0"]], 2);
        assert!((beta_at(&swap, &[int(4), int(1)], 1e-12).unwrap() - 2.0).abs() < 1e-10);
        assert!(beta_at(&swap, &[int(0), int(1)], 1e-12).is_err());
        let tri = mat(&[&["x1", "x2"], &["0", "2*x1"]], 2);
        assert!((beta_at(&tri, &x, 1e-12).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn residuals() {
        let sym = mat(&[&["x1", "x2"], &["x2", "x1"]], 2);
        assert!(charpoly_residual(&sym, &parse("x1+x2", 2).unwrap()).unwrap().is_zero());
        let one = mat(&[&["x1"]], 1);
        assert!(charpoly_residual(&one, &parse("x1", 1).unwrap()).unwrap().is_zero());
        let swap = mat(&[&["0", "x1"], &["x2", "0"]], 2);
        let r = charpoly_residual(&swap, &parse("x1", 2).unwrap()).unwrap();
        assert_eq!(r, parse("x1^2 - x1*x2", 2).unwrap());
        let three = mat(&[&["1", "2", "0"], &["0", "3", "4"], &["5", "0", "6"]], 1);
        // det(t I - A) at t = 0 is -det(A) = -(18 + 40)
        assert_eq!(charpoly_residual(&three, &Polynomial::zero(1)).unwrap(), parse("-58", 1).unwrap());
    }

    #[test]
    fn verification() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let sym = mat(&[&["x1", "x2"], &["x2", "x1"]], 2);
        let rep = verify_beta(&sym, &parse("x1+x2", 2).unwrap(), 20, 1e-9, &mut rng).unwrap();
        assert_eq!(rep.verdict, BetaVerdict::Verified);
        assert!(rep.samples.iter().all(|s| s.gap_to_second_modulus.unwrap() > 0.0));
        let wrong = verify_beta(&sym, &parse("x1-x2", 2).unwrap(), 20, 1e-9, &mut rng).unwrap();
        assert_eq!(wrong.exact_charpoly_zero, Some(true));
        assert_eq!(wrong.verdict, BetaVerdict::Refuted);
        let swap = mat(&[&["0", "x1"], &["x2", "0"]], 2);
        let rep = verify_beta(&swap, &parse("x1", 2).unwrap(), 5, 1e-9, &mut rng).unwrap();
        assert_eq!(rep.verdict, BetaVerdict::Refuted);
        let tri = mat(&[&["0", "x1"], &["0", "0"]], 1);
        let rep = verify_beta(&tri, &parse("x1", 1).unwrap(), 5, 1e-9, &mut rng).unwrap();
        assert_eq!(rep.verdict, BetaVerdict::Inconclusive);
    }

    #[test]
    fn eigenvalue_gap() {
        let m = [0.0, 2.0, 2.0, 0.0];
        assert!(modulus_gap(&m, 2, 2.0).abs() < 1e-9);
        let m = [3.0, 1.0, 1.0, 3.0];
        assert!((modulus_gap(&m, 2, 4.0) - 2.0).abs() < 1e-9);
    }
}
