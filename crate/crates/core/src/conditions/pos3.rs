//! Pos3 search on the normalized domain: `r` on the standard simplex and
//! phases `theta` with the first phase pinned to zero.
//!
//! With `z = r e^{i theta}` the gap `D = p(r)^2 - |p(z)|^2` expands pairwise as
//! `sum_{I<J} 2 c_I c_J r^{I+J} versin(<I - J, theta>)`, which is how the
//! interval enclosures below are formed. The aligned set is measured by
//! `M = sum_{j<k} 2 r_j r_k versin(theta_j - theta_k)`, which vanishes
//! exactly there.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{check_input, BudgetUsed, Certificate, Condition, ConditionReport, Pos3Certificate, Verdict, Witness};
use crate::error::{Error, Result};
use crate::geometry::jf_matrix;
use crate::par;
use crate::poly::{best_rational, to_f64, GaussianRational, Interval, Polynomial, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pos3Mode {
    Falsify,
    Certify,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pos3Options {
    pub mode: Pos3Mode,
    /// Grid points per unit of the simplex and per turn of each phase.
    pub grid: u32,
    /// Cap on halvings along any single box axis.
    pub max_depth: u32,
    /// Boxes whose misalignment stays below `delta` are handed to the `J_f` probe.
    pub delta: f64,
    /// Slack on the normalized gap when ranking grid candidates.
    pub tolerance: f64,
    /// Cap on grid evaluations; the grid is coarsened to fit.
    pub max_evals: u64,
    pub max_boxes: u64,
    /// Interior sample points per dehomogenization chart.
    pub jf_samples: u32,
    /// Candidates taken to local refinement.
    pub refine_starts: usize,
}

impl Default for Pos3Options {
    fn default() -> Self {
        Pos3Options {
            mode: Pos3Mode::Certify,
            grid: 32,
            max_depth: 24,
            delta: 1e-3,
            tolerance: 1e-12,
            max_evals: 500_000,
            max_boxes: 2_000_000,
            jf_samples: 8,
            refine_starts: 8,
        }
    }
}

impl Pos3Options {
    pub fn falsify() -> Self {
        Pos3Options {
            mode: Pos3Mode::Falsify,
            ..Self::default()
        }
    }

    pub fn certify() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("delta and tolerance must be positive".into()));
        }
        if self.grid == 0 || self.max_depth == 0 {
            return Err(Error::InvalidArgument("grid and max_depth must be positive".into()));
        }
        Ok(())
    }
}

/// A box the certifier could neither close nor refute, in full coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct UnresolvedBox {
    pub r: Vec<(f64, f64)>,
    pub theta: Vec<(f64, f64)>,
    /// Largest number of halvings along one axis.
    pub depth: u32,
}

const MAX_UNRESOLVED_LISTED: usize = 32;
const BATCH: usize = 4096;
const SNAP_DENOMINATORS: [u64; 5] = [16, 256, 4096, 65536, 1 << 24];

/// `sum_{j<k} 2 r_j r_k versin(theta_j - theta_k)`.
pub fn misalignment(r: &[f64], theta: &[f64]) -> f64 {
    let mut m = 0.0;
    for j in 0..r.len() {
        for k in j + 1..r.len() {
            let s = libm::sin(0.5 * (theta[j] - theta[k]));
            m += 4.0 * r[j] * r[k] * s * s;
        }
    }
    m
}

struct Group {
    delta: Vec<i64>,
    terms: Vec<(Vec<u32>, Interval)>,
}

struct Form {
    n: usize,
    d: u32,
    terms: Vec<(Vec<u32>, f64)>,
    iterms: Vec<(Vec<u32>, Interval)>,
    groups: Vec<Group>,
}

#[derive(Clone)]
struct Candidate {
    score: f64,
    r: Vec<f64>,
    theta: Vec<f64>,
}

struct Enclosure {
    gap: Interval,
    base: Interval,
    misalign: Interval,
}

/// A box over the moduli and phases of every coordinate except `pin`.
#[derive(Clone)]
struct Cell {
    pin: usize,
    r: Vec<Interval>,
    theta: Vec<Interval>,
    /// Halvings so far along each axis, moduli first.
    splits: Vec<u32>,
}

impl Cell {
    fn depth(&self) -> u32 {
        self.splits.iter().copied().max().unwrap_or(0)
    }
}

enum Outcome {
    Outside,
    Proved,
    NearAligned,
    Negative(Vec<f64>, Vec<f64>),
    Split(Cell, Cell),
    Unresolved,
}

impl Form {
    fn new(p: &Polynomial, d: u32) -> Self {
        let exact: Vec<(Vec<u32>, Rational)> = p
            .terms()
            .map(|(e, c)| (e.exponents().to_vec(), c.clone()))
            .collect();
        let two = Rational::from_integer(2.into());
        let mut grouped: BTreeMap<Vec<i64>, BTreeMap<Vec<u32>, Rational>> = BTreeMap::new();
        for a in 0..exact.len() {
            for b in a + 1..exact.len() {
                let (ei, ci) = &exact[a];
                let (ej, cj) = &exact[b];
                let mut delta: Vec<i64> = ei.iter().zip(ej).map(|(&x, &y)| x as i64 - y as i64).collect();
                if delta.iter().find(|v| **v != 0).is_some_and(|v| *v < 0) {
                    delta.iter_mut().for_each(|v| *v = -*v);
                }
                let sum: Vec<u32> = ei.iter().zip(ej).map(|(x, y)| x + y).collect();
                *grouped
                    .entry(delta)
                    .or_default()
                    .entry(sum)
                    .or_insert_with(Rational::zero) += &two * ci * cj;
            }
        }
        let groups = grouped
            .into_iter()
            .map(|(delta, t)| Group {
                delta,
                terms: t
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (e, Interval::from_rational(&c)))
                    .collect(),
            })
            .filter(|g| !g.terms.is_empty())
            .collect();
        Form {
            n: p.nvars(),
            d,
            terms: exact.iter().map(|(e, c)| (e.clone(), to_f64(c))).collect(),
            iterms: exact.iter().map(|(e, c)| (e.clone(), Interval::from_rational(c))).collect(),
            groups,
        }
    }

    /// `(|p(z)| - p(r)) / sum |c_I| r^I`, or `None` inside the excluded band.
    fn score(&self, r: &[f64], theta: &[f64], delta: f64) -> Option<f64> {
        let total: f64 = r.iter().sum();
        if misalignment(r, theta) < delta * total * total {
            return None;
        }
        let d = self.d as usize;
        let mut rp = vec![1.0; self.n * (d + 1)];
        let mut zp = vec![Complex64::new(1.0, 0.0); self.n * (d + 1)];
        for j in 0..self.n {
            let z = Complex64::from_polar(r[j], theta[j]);
            for k in 1..=d {
                rp[j * (d + 1) + k] = rp[j * (d + 1) + k - 1] * r[j];
                zp[j * (d + 1) + k] = zp[j * (d + 1) + k - 1] * z;
            }
        }
        let mut pr = 0.0;
        let mut pabs = 0.0;
        let mut pz = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut rv = *c;
            let mut zv = Complex64::new(*c, 0.0);
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    rv *= rp[j * (d + 1) + k as usize];
                    zv *= zp[j * (d + 1) + k as usize];
                }
            }
            pr += rv;
            pabs += rv.abs();
            pz += zv;
        }
        if !(pabs > 0.0) {
            return None;
        }
        Some((pz.norm() - pr) / pabs)
    }

    fn enclose(&self, r: &[Interval], theta: &[Interval]) -> Enclosure {
        let top = 2 * self.d as usize;
        let pw: Vec<Vec<Interval>> = r
            .iter()
            .map(|x| (0..=top).map(|e| x.powi(e as u32)).collect())
            .collect();
        let mono = |e: &[u32]| {
            e.iter().enumerate().fold(Interval::point(1.0), |acc, (j, &k)| {
                if k == 0 {
                    acc
                } else {
                    acc * pw[j][k as usize]
                }
            })
        };
        let mut base = Interval::point(0.0);
        for (e, c) in &self.iterms {
            base = base + *c * mono(e);
        }
        let mut gap = Interval::point(0.0);
        for g in &self.groups {
            let mut q = Interval::point(0.0);
            for (e, c) in &g.terms {
                q = q + *c * mono(e);
            }
            let mut phase = Interval::point(0.0);
            for (j, &k) in g.delta.iter().enumerate() {
                if k != 0 {
                    phase = phase + theta[j].scale(k as f64);
                }
            }
            gap = gap + q * phase.versin();
        }
        let mut misalign = Interval::point(0.0);
        for j in 0..self.n {
            for k in j + 1..self.n {
                misalign = misalign + (r[j] * r[k]).scale(2.0) * (theta[j] - theta[k]).versin();
            }
        }
        Enclosure { gap, base, misalign }
    }

    fn powers(&self, r: &[Interval]) -> Vec<Vec<Interval>> {
        let top = 2 * self.d;
        r.iter().map(|x| (0..=top).map(|e| x.powi(e)).collect()).collect()
    }

    /// Bounds on `|dD/dr_j|` and `|dD/dtheta_j|` over a box.
    fn gap_smear(&self, r: &[Interval], theta: &[Interval]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let pw = self.powers(r);
        let mut gr = vec![0.0; n];
        let mut gt = vec![0.0; n];
        for g in &self.groups {
            let mut phase = Interval::point(0.0);
            for (j, &k) in g.delta.iter().enumerate() {
                if k != 0 {
                    phase = phase + theta[j].scale(k as f64);
                }
            }
            let vers = mag(phase.versin());
            let sin = mag(phase.sin());
            let mut q = 0.0;
            for (e, c) in &g.terms {
                let cm = mag(*c);
                let mut m = cm;
                for (j, &k) in e.iter().enumerate() {
                    m *= pw[j][k as usize].hi();
                }
                q += m;
                for (j, &k) in e.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    let mut dm = cm * k as f64;
                    for (i, &ki) in e.iter().enumerate() {
                        let ex = if i == j { ki - 1 } else { ki };
                        dm *= pw[i][ex as usize].hi();
                    }
                    gr[j] += dm * vers;
                }
            }
            for (j, &k) in g.delta.iter().enumerate() {
                gt[j] += q * (k.unsigned_abs() as f64) * sin;
            }
        }
        (gr, gt)
    }

    /// Bounds on `|dp/dr_j|` over a box.
    fn base_smear(&self, r: &[Interval]) -> Vec<f64> {
        let pw = self.powers(r);
        let mut gr = vec![0.0; self.n];
        for (e, c) in &self.iterms {
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut dm = mag(*c) * k as f64;
                for (i, &ki) in e.iter().enumerate() {
                    let ex = if i == j { ki - 1 } else { ki };
                    dm *= pw[i][ex as usize].hi();
                }
                gr[j] += dm;
            }
        }
        gr
    }

    /// Bounds on the partials of `sum_{j<k} 2 r_j r_k versin(theta_j - theta_k)`.
    fn misalign_smear(&self, r: &[Interval], theta: &[Interval]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut gr = vec![0.0; n];
        let mut gt = vec![0.0; n];
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let diff = theta[j] - theta[k];
                gr[j] += 2.0 * r[k].hi() * mag(diff.versin());
                gt[j] += 2.0 * r[j].hi() * r[k].hi() * mag(diff.sin());
            }
        }
        (gr, gt)
    }

    fn enclose_point(&self, r: &[f64], theta: &[f64]) -> Enclosure {
        let ri: Vec<Interval> = r.iter().map(|&v| Interval::point(v)).collect();
        let ti: Vec<Interval> = theta.iter().map(|&v| Interval::point(v)).collect();
        self.enclose(&ri, &ti)
    }
}

/// Interval enclosures of `(D, p(r), M)` at a single point.
pub(crate) fn point_enclosures(p: &Polynomial, r: &[f64], theta: &[f64]) -> Result<(Interval, Interval, Interval)> {
    let d = check_input(p)?;
    let n = p.nvars();
    for v in [r.len(), theta.len()] {
        if v != n {
            return Err(Error::DimensionMismatch { expected: n, found: v });
        }
    }
    if r.iter().chain(theta).any(|v| !v.is_finite()) || r.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("moduli must be finite and nonnegative".into()));
    }
    let e = Form::new(p, d).enclose_point(r, theta);
    Ok((e.gap, e.base, e.misalign))
}

/// Whether every nonzero coordinate has the same argument.
pub(crate) fn gaussian_aligned(z: &[GaussianRational]) -> bool {
    let first = match z.iter().find(|c| !c.is_zero()) {
        Some(f) => f.conj(),
        None => return true,
    };
    z.iter().filter(|c| !c.is_zero()).all(|c| {
        let w = c * &first;
        w.im.is_zero() && w.re.is_positive()
    })
}

fn quarter_unit(theta: f64) -> GaussianRational {
    let k = libm::round(theta / FRAC_PI_2) as i64;
    let (re, im) = match k.rem_euclid(4) {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    };
    GaussianRational::new(Rational::from_integer(re.into()), Rational::from_integer(im.into()))
}

/// A rational point of the unit circle near `e^{i theta}`, via `t = tan(theta/2)`.
fn pythagorean_unit(theta: f64, max_den: u64) -> GaussianRational {
    let mut t = theta % TAU;
    if t > PI {
        t -= TAU;
    } else if t <= -PI {
        t += TAU;
    }
    let tan = libm::tan(0.5 * t);
    if !tan.is_finite() || tan.abs() > 1e8 {
        return GaussianRational::real(-Rational::one());
    }
    let q = best_rational(tan, max_den);
    let q2 = &q * &q;
    let den = Rational::one() + &q2;
    GaussianRational::new((Rational::one() - q2) / &den, (&q + &q) / den)
}

/// Rotates so the last nonzero coordinate is positive real, then scales to
/// a primitive Gaussian-integer vector.
fn canonical(z: &[GaussianRational], r: &[Rational]) -> (Vec<GaussianRational>, Vec<Rational>) {
    let k = match r.iter().rposition(|v| !v.is_zero()) {
        Some(k) => k,
        None => return (z.to_vec(), r.to_vec()),
    };
    let rot = z[k].conj().scale(&(Rational::one() / &r[k]));
    let rotated: Vec<GaussianRational> = z.iter().map(|c| c * &rot).collect();
    let mut lcm = BigInt::one();
    for c in &rotated {
        for part in [&c.re, &c.im] {
            lcm = lcm.lcm(part.denom());
        }
    }
    let mut gcd = BigInt::zero();
    for c in &rotated {
        for part in [&c.re, &c.im] {
            let v = part * Rational::from_integer(lcm.clone());
            gcd = gcd.gcd(v.numer());
        }
    }
    if gcd.is_zero() {
        gcd = BigInt::one();
    }
    let s = Rational::new(lcm, gcd);
    (
        rotated.iter().map(|c| c.scale(&s)).collect(),
        r.iter().map(|v| v * &s).collect(),
    )
}

fn exact_witness(p: &Polynomial, r: &[Rational], u: &[GaussianRational]) -> Result<Option<Witness>> {
    let z: Vec<GaussianRational> = u.iter().zip(r).map(|(c, m)| c.scale(m)).collect();
    if gaussian_aligned(&z) {
        return Ok(None);
    }
    let bound = p.eval_rational(r)?;
    let value = p.eval_gaussian(&z)?;
    if bound.is_positive() && value.norm_sqr() < &bound * &bound {
        return Ok(None);
    }
    let (z, moduli) = canonical(&z, r);
    let value = p.eval_gaussian(&z)?;
    let bound = p.eval_rational(&moduli)?;
    Ok(Some(Witness::ExactComplex { z, moduli, value, bound }))
}

struct Engine<'a> {
    p: &'a Polynomial,
    form: Form,
    opts: &'a Pos3Options,
}

impl<'a> Engine<'a> {
    /// Tries exact snapping first, then a point interval enclosure.
    fn validate(&self, r: &[f64], theta: &[f64]) -> Result<Option<Witness>> {
        let r: Vec<f64> = r.iter().map(|&v| v.max(0.0)).collect();
        for &den in &SNAP_DENOMINATORS {
            let re: Vec<Rational> = r
                .iter()
                .map(|&v| if v == 0.0 { Rational::zero() } else { best_rational(v, den) })
                .collect();
            if re.iter().any(|v| v.is_negative()) {
                continue;
            }
            let quarter: Vec<GaussianRational> = theta.iter().map(|&t| quarter_unit(t)).collect();
            if let Some(w) = exact_witness(self.p, &re, &quarter)? {
                return Ok(Some(w));
            }
            let pyth: Vec<GaussianRational> = theta.iter().map(|&t| pythagorean_unit(t, den)).collect();
            if let Some(w) = exact_witness(self.p, &re, &pyth)? {
                return Ok(Some(w));
            }
        }
        let e = self.form.enclose_point(&r, theta);
        if e.misalign.is_positive() && (e.gap.is_negative() || e.base.is_negative()) {
            return Ok(Some(Witness::FloatComplex {
                r,
                theta: theta.to_vec(),
                gap: e.gap,
            }));
        }
        Ok(None)
    }

    fn grid_size(&self) -> u32 {
        let n = self.form.n as u32;
        let count = |g: u32| -> f64 {
            // Points with k >= 2 nonzero moduli carry g^(k-1) phase choices.
            let mut total = 0.0;
            for k in 2..=n {
                total += binom(n, k) * binom(g.saturating_sub(1), k - 1) * libm::pow(g as f64, (k - 1) as f64);
            }
            total
        };
        let mut g = self.opts.grid.max(2);
        while g > 2 && count(g) > self.opts.max_evals as f64 {
            g -= 1;
        }
        g
    }

    /// Grid pass: best few candidates by normalized gap.
    fn grid_candidates(&self, budget: &mut BudgetUsed) -> (u32, Vec<Candidate>) {
        let n = self.form.n;
        let g = self.grid_size();
        let comps = compositions(g, n);
        let keep = self.opts.refine_starts.max(1);
        let results = par::map(&comps, |comp| {
            let nz: Vec<usize> = (0..n).filter(|&j| comp[j] > 0).collect();
            let mut best: Vec<Candidate> = Vec::new();
            let mut evals = 0u64;
            if nz.len() < 2 {
                return (evals, best);
            }
            let r: Vec<f64> = comp.iter().map(|&c| c as f64 / g as f64).collect();
            let free = &nz[1..];
            let mut digits = vec![0u32; free.len()];
            let mut theta = vec![0.0; n];
            loop {
                for (slot, &j) in free.iter().enumerate() {
                    theta[j] = TAU * digits[slot] as f64 / g as f64;
                }
                evals += 1;
                if let Some(s) = self.form.score(&r, &theta, self.opts.delta) {
                    push_best(
                        &mut best,
                        Candidate {
                            score: s,
                            r: r.clone(),
                            theta: theta.clone(),
                        },
                        keep,
                    );
                }
                let mut i = 0;
                while i < digits.len() {
                    digits[i] += 1;
                    if digits[i] < g {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == digits.len() {
                    break;
                }
            }
            (evals, best)
        });
        let mut all = Vec::new();
        for (evals, cands) in results {
            budget.evaluations += evals;
            all.extend(cands);
        }
        sort_candidates(&mut all);
        all.truncate(keep);
        (g, all)
    }

    /// Compass search maximizing the normalized gap off the excluded band.
    fn refine(&self, start: &Candidate, g: u32, budget: &mut BudgetUsed) -> Candidate {
        let n = self.form.n;
        let pinned = start.r.iter().position(|&v| v > 0.0).unwrap_or(0);
        let mut cur = start.clone();
        let mut step_r = 1.0 / g as f64;
        let mut step_t = TAU / g as f64;
        budget.refinements += 1;
        for _ in 0..60 {
            let mut improved = false;
            for j in 0..n {
                for sign in [1.0, -1.0] {
                    let mut r = cur.r.clone();
                    r[j] = (r[j] + sign * step_r).max(0.0);
                    let total: f64 = r.iter().sum();
                    if total <= 0.0 {
                        continue;
                    }
                    r.iter_mut().for_each(|v| *v /= total);
                    let t = cur.theta.clone();
                    improved |= self.try_move(&mut cur, r, t, budget);
                    if j != pinned {
                        let mut t = cur.theta.clone();
                        t[j] += sign * step_t;
                        let r = cur.r.clone();
                        improved |= self.try_move(&mut cur, r, t, budget);
                    }
                }
            }
            if !improved {
                step_r *= 0.5;
                step_t *= 0.5;
                if step_r < 1e-13 {
                    break;
                }
            }
        }
        cur
    }

    fn try_move(&self, cur: &mut Candidate, r: Vec<f64>, theta: Vec<f64>, budget: &mut BudgetUsed) -> bool {
        budget.evaluations += 1;
        match self.form.score(&r, &theta, self.opts.delta) {
            Some(s) if s > cur.score => {
                *cur = Candidate { score: s, r, theta };
                true
            }
            _ => false,
        }
    }

    fn falsify(&self, budget: &mut BudgetUsed) -> Result<(u32, Option<Witness>)> {
        let (g, cands) = self.grid_candidates(budget);
        for c in &cands {
            if c.score >= -self.opts.tolerance {
                if let Some(w) = self.validate(&c.r, &c.theta)? {
                    return Ok((g, Some(w)));
                }
            }
        }
        for c in &cands {
            let refined = self.refine(c, g, budget);
            if refined.score >= -self.opts.tolerance {
                if let Some(w) = self.validate(&refined.r, &refined.theta)? {
                    return Ok((g, Some(w)));
                }
            }
        }
        Ok((g, None))
    }

    /// Full coordinates of a cell: the pinned modulus is `1 - sum` of the
    /// others and its phase is zero. The cell is cut down to the region where
    /// the pinned modulus is the largest; `None` if nothing is left.
    fn expand(&self, cell: &Cell) -> Option<(Vec<Interval>, Vec<Interval>)> {
        let n = self.form.n;
        let slack = 4.0 * f64::EPSILON * n as f64;
        let lo_sum: f64 = cell.r.iter().map(|v| v.lo()).sum();
        if lo_sum > 1.0 + slack {
            return None;
        }
        let hi_sum: f64 = cell.r.iter().map(|v| v.hi()).sum();
        let max_lo = cell.r.iter().map(|v| v.lo()).fold(0.0, f64::max);
        let pin_hi = (1.0 - lo_sum + slack).min(1.0);
        if pin_hi < max_lo {
            return None;
        }
        let pin_lo = (1.0 - hi_sum - slack).max(max_lo).min(pin_hi);
        let mut r = vec![Interval::point(0.0); n];
        let mut theta = vec![Interval::point(0.0); n];
        r[cell.pin] = Interval::new(pin_lo, pin_hi);
        for (slot, j) in others(cell.pin, n).enumerate() {
            let v = cell.r[slot];
            let cap = (1.0 - (lo_sum - v.lo()) + slack).min(pin_hi);
            r[j] = Interval::new(v.lo(), v.hi().min(cap).max(v.lo()));
            theta[j] = cell.theta[slot];
        }
        Some((r, theta))
    }

    /// A point of the cell that lies on the simplex.
    fn feasible_point(&self, cell: &Cell) -> (Vec<f64>, Vec<f64>) {
        let n = self.form.n;
        let lo_sum: f64 = cell.r.iter().map(|v| v.lo()).sum();
        let w_sum: f64 = cell.r.iter().map(|v| v.width()).sum();
        let alpha = if w_sum > 0.0 {
            (0.5f64).min(((1.0 - lo_sum) / w_sum).max(0.0))
        } else {
            0.5
        };
        let mut r = vec![0.0; n];
        let mut theta = vec![0.0; n];
        let mut used = 0.0;
        for (slot, j) in others(cell.pin, n).enumerate() {
            let v = cell.r[slot];
            r[j] = v.lo() + alpha * v.width();
            used += r[j];
            theta[j] = cell.theta[slot].mid();
        }
        r[cell.pin] = (1.0 - used).max(0.0);
        (r, theta)
    }

    fn classify(&self, cell: &Cell) -> Outcome {
        let (r, theta) = match self.expand(cell) {
            Some(x) => x,
            None => return Outcome::Outside,
        };
        let e = self.form.enclose(&r, &theta);
        if e.gap.is_negative() || (e.base.is_negative() && e.misalign.is_positive()) {
            let (pr, pt) = self.feasible_point(cell);
            return Outcome::Negative(pr, pt);
        }
        if e.gap.is_positive() {
            if e.base.is_positive() {
                return Outcome::Proved;
            }
            // D > 0 keeps p(r) away from zero on the cell, so one sign settles it.
            let (pr, pt) = self.feasible_point(cell);
            let at = self.form.enclose_point(&pr, &pt).base;
            if at.is_positive() {
                return Outcome::Proved;
            }
            if at.is_negative() {
                return Outcome::Negative(pr, pt);
            }
        }
        if e.misalign.hi() <= self.opts.delta && e.base.is_positive() {
            return Outcome::NearAligned;
        }
        match self.split(cell, &r, &theta, &e) {
            Some((a, b)) => Outcome::Split(a, b),
            None => Outcome::Unresolved,
        }
    }

    /// Halves the axis along which the deciding quantity can move the
    /// most: the gap once the cell is clear of the aligned set, `p(r)` once
    /// it is inside the excluded band, the misalignment otherwise. `None` once that axis has been halved
    /// `max_depth` times.
    fn split(&self, cell: &Cell, r_full: &[Interval], theta_full: &[Interval], e: &Enclosure) -> Option<(Cell, Cell)> {
        let (gr, gt) = if e.misalign.is_positive() {
            self.form.gap_smear(r_full, theta_full)
        } else if e.misalign.hi() <= self.opts.delta {
            (self.form.base_smear(r_full), vec![0.0; self.form.n])
        } else {
            self.form.misalign_smear(r_full, theta_full)
        };
        let nr = cell.r.len();
        let mut axis = 0;
        let mut best = -1.0;
        for (slot, j) in others(cell.pin, self.form.n).enumerate() {
            let sr = cell.r[slot].width() * (gr[j] + gr[cell.pin]);
            if sr > best {
                best = sr;
                axis = slot;
            }
            let st = cell.theta[slot].width() * gt[j];
            if st > best {
                best = st;
                axis = nr + slot;
            }
        }
        if !(best > 0.0) {
            // Flat along every axis: fall back to the widest side in turns.
            axis = (0..cell.splits.len())
                .max_by(|&x, &y| {
                    let w = |i: usize| if i < nr { cell.r[i].width() } else { cell.theta[i - nr].width() / TAU };
                    w(x).partial_cmp(&w(y)).unwrap_or(core::cmp::Ordering::Equal)
                })
                .unwrap_or(0);
        }
        if cell.splits[axis] >= self.opts.max_depth {
            return None;
        }
        Some(halve(cell, axis))
    }

    fn unresolved_box(&self, cell: &Cell) -> UnresolvedBox {
        let n = self.form.n;
        let (r, theta) = self.expand(cell).unwrap_or_else(|| {
            let mut r = vec![Interval::point(0.0); n];
            let mut t = vec![Interval::point(0.0); n];
            for (slot, j) in others(cell.pin, n).enumerate() {
                r[j] = cell.r[slot];
                t[j] = cell.theta[slot];
            }
            (r, t)
        });
        UnresolvedBox {
            r: r.iter().map(|v| (v.lo(), v.hi())).collect(),
            theta: theta.iter().map(|v| (v.lo(), v.hi())).collect(),
            depth: cell.depth(),
        }
    }
}

fn mag(v: Interval) -> f64 {
    v.lo().abs().max(v.hi().abs())
}

fn others(pin: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&j| j != pin)
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, total, &mut cur, &mut out);
    }
    out
}

fn sort_candidates(c: &mut [Candidate]) {
    c.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(core::cmp::Ordering::Equal));
}

fn push_best(best: &mut Vec<Candidate>, c: Candidate, keep: usize) {
    if best.len() == keep && best.last().is_some_and(|w| w.score >= c.score) {
        return;
    }
    let at = best.iter().position(|b| b.score < c.score).unwrap_or(best.len());
    best.insert(at, c);
    best.truncate(keep);
}

fn halve(cell: &Cell, axis: usize) -> (Cell, Cell) {
    let nr = cell.r.len();
    let mut a = cell.clone();
    let mut b = cell.clone();
    a.splits[axis] += 1;
    b.splits[axis] += 1;
    if axis < nr {
        let (x, y) = cell.r[axis].bisect();
        a.r[axis] = x;
        b.r[axis] = y;
    } else {
        let (x, y) = cell.theta[axis - nr].bisect();
        a.theta[axis - nr] = x;
        b.theta[axis - nr] = y;
    }
    (a, b)
}

/// Exact positive-definiteness of `J_f` for `f = p` with one coordinate set
/// to 1, at interior points of the simplex. Returns `(points, failure)`.
fn jf_probe(p: &Polynomial, samples: u32) -> Result<(u32, Option<alloc::string::String>)> {
    let n = p.nvars();
    let samples = samples.max(1) as usize;
    let mut g = n as u32;
    while (binom(g - 1, n as u32 - 1) as usize) < samples {
        g += 1;
    }
    let interior: Vec<Vec<u32>> = compositions(g - n as u32, n)
        .into_iter()
        .map(|c| c.iter().map(|v| v + 1).collect())
        .collect();
    let step = interior.len() as f64 / samples as f64;
    let picks: Vec<&Vec<u32>> = (0..samples.min(interior.len()))
        .map(|i| &interior[(i as f64 * step) as usize])
        .collect();
    let mut points = 0u32;
    for j in 0..n {
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.swap(j, n - 1);
        let f = p.dehomogenize(n - 1, &sigma)?;
        for comp in &picks {
            let last = Rational::from_integer(comp[sigma[n - 1]].into());
            let s: Vec<Rational> = sigma[..n - 1]
                .iter()
                .map(|&k| Rational::from_integer(comp[k].into()) / &last)
                .collect();
            points += 1;
            let pd = match jf_matrix(&f, &s) {
                Ok(m) => m.is_positive_definite()?,
                Err(Error::NonPositive(_)) => false,
                Err(e) => return Err(e),
            };
            if !pd {
                let at: Vec<alloc::string::String> = s.iter().map(|v| format!("{}", v)).collect();
                return Ok((
                    points,
                    Some(format!(
                        "J_f not positive definite for x{} = 1 at s = ({})",
                        j + 1,
                        at.join(", ")
                    )),
                ));
            }
        }
    }
    Ok((points, None))
}

pub fn check_pos3(p: &Polynomial, opts: &Pos3Options) -> Result<ConditionReport> {
    opts.validate()?;
    let d = check_input(p)?;
    let n = p.nvars();
    let mut budget = BudgetUsed::default();
    let cert = |vacuous: bool| Pos3Certificate {
        delta: opts.delta,
        max_depth: opts.max_depth,
        depth_reached: 0,
        boxes_proved: 0,
        boxes_near_aligned: 0,
        jf_points: 0,
        jf_all_positive_definite: true,
        vacuous,
        resolution_limited: !vacuous,
    };
    if n == 1 {
        let mut report = ConditionReport::new(Condition::Pos3, Verdict::Holds);
        report.certificate = Some(Certificate::Pos3(cert(true)));
        report
            .notes
            .push("single variable: every point is aligned, condition is vacuous".into());
        return Ok(report);
    }

    let engine = Engine {
        p,
        form: Form::new(p, d),
        opts,
    };
    let failed = |w: Witness, budget: BudgetUsed| {
        let mut report = ConditionReport::new(Condition::Pos3, Verdict::Fails);
        report.witness = Some(w);
        report.budget = budget;
        report
    };

    let (g, found) = engine.falsify(&mut budget)?;
    if let Some(w) = found {
        return Ok(failed(w, budget));
    }
    if opts.mode == Pos3Mode::Falsify {
        let mut report = ConditionReport::new(Condition::Pos3, Verdict::Inconclusive);
        report.notes.push(format!("no counterexample found on a grid of {} per axis", g));
        report.budget = budget;
        return Ok(report);
    }

    // One root per choice of the largest modulus; off the pinned coordinate
    // every modulus is then at most 1/2.
    let mut stack: Vec<Cell> = (0..n)
        .rev()
        .map(|pin| Cell {
            pin,
            r: vec![Interval::new(0.0, 0.5); n - 1],
            theta: vec![Interval::new(-1e-9, TAU); n - 1],
            splits: vec![0; 2 * (n - 1)],
        })
        .collect();
    let mut unresolved: Vec<Cell> = Vec::new();
    let mut unresolved_count = 0u64;
    let mut proved = 0u64;
    let mut near = 0u64;
    let mut negative: Option<(Vec<f64>, Vec<f64>)> = None;
    while !stack.is_empty() && negative.is_none() {
        if budget.boxes >= opts.max_boxes {
            break;
        }
        let take = stack
            .len()
            .min(BATCH)
            .min((opts.max_boxes - budget.boxes) as usize);
        let batch = stack.split_off(stack.len() - take);
        let outcomes = par::map(&batch, |c| engine.classify(c));
        budget.boxes += take as u64;
        for (cell, out) in batch.into_iter().zip(outcomes) {
            budget.depth_reached = budget.depth_reached.max(cell.depth());
            match out {
                Outcome::Outside => {}
                Outcome::Proved => proved += 1,
                Outcome::NearAligned => near += 1,
                Outcome::Negative(r, t) => {
                    negative.get_or_insert((r, t));
                }
                Outcome::Unresolved => {
                    unresolved_count += 1;
                    if unresolved.len() < MAX_UNRESOLVED_LISTED {
                        unresolved.push(cell);
                    }
                }
                Outcome::Split(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
    }

    if let Some((r, t)) = negative {
        if let Some(w) = engine.validate(&r, &t)? {
            return Ok(failed(w, budget));
        }
    }

    let exhausted = !stack.is_empty();
    if exhausted || unresolved_count > 0 {
        for cell in unresolved.iter().chain(stack.iter().rev()).take(opts.refine_starts) {
            let (r, t) = engine.feasible_point(cell);
            let score = engine.form.score(&r, &t, opts.delta).unwrap_or(f64::NEG_INFINITY);
            let start = Candidate { score, r, theta: t };
            let refined = engine.refine(&start, g, &mut budget);
            if let Some(w) = engine.validate(&refined.r, &refined.theta)? {
                return Ok(failed(w, budget));
            }
        }
        let mut report = ConditionReport::new(Condition::Pos3, Verdict::Inconclusive);
        if exhausted {
            report.notes.push(format!(
                "box budget of {} exhausted with {} boxes pending",
                opts.max_boxes,
                stack.len()
            ));
        }
        if unresolved_count > 0 {
            report.notes.push(format!(
                "{} boxes unresolved at depth {}",
                unresolved_count, opts.max_depth
            ));
        }
        report.unresolved = unresolved
            .iter()
            .chain(stack.iter().rev())
            .take(MAX_UNRESOLVED_LISTED)
            .map(|c| engine.unresolved_box(c))
            .collect();
        report.budget = budget;
        return Ok(report);
    }

    let (jf_points, jf_failure) = jf_probe(p, opts.jf_samples)?;
    let mut c = cert(false);
    c.depth_reached = budget.depth_reached;
    c.boxes_proved = proved;
    c.boxes_near_aligned = near;
    c.jf_points = jf_points;
    c.jf_all_positive_definite = jf_failure.is_none();
    let verdict = if jf_failure.is_none() {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    let mut report = ConditionReport::new(Condition::Pos3, verdict);
    report.certificate = Some(Certificate::Pos3(c));
    if let Some(msg) = jf_failure {
        report.notes.push(msg);
    }
    report.budget = budget;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, parse};

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(4, 1), vec![vec![4]]);
    }

    #[test]
    fn pos3_violator_has_exact_witness() {
        let violator = p("(x1+x2)^4 - 8*x1^2*x2^2", 2);
        let r = check_pos3(&violator, &Pos3Options::falsify()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let w = r.witness.unwrap();
        match &w {
            Witness::ExactComplex { z, value, bound, .. } => {
                assert_eq!(z[0], GaussianRational::real(int(-1)));
                assert_eq!(z[1], GaussianRational::real(int(1)));
                assert_eq!(value.re, int(-8));
                assert_eq!(bound, &int(8));
            }
            other => panic!("expected exact witness, got {:?}", other),
        }
        assert!(w.recheck(&violator).unwrap());
    }

    #[test]
    fn linear_form_certifies() {
        let lin = p("x1+x2", 2);
        let r = check_pos3(&lin, &Pos3Options::certify()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);
    }

    #[test]
    fn dv7_certifies() {
        let p7 = p("(x1+x2)^4 - 7*x1^2*x2^2", 2);
        let r = check_pos3(&p7, &Pos3Options::certify()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{:?}", r.notes);
        match r.certificate {
            Some(Certificate::Pos3(c)) => assert!(c.resolution_limited && c.jf_all_positive_definite),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn dv9_fails() {
        let p9 = p("(x1+x2)^4 - 9*x1^2*x2^2", 2);
        let r = check_pos3(&p9, &Pos3Options::certify()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.unwrap().recheck(&p9).unwrap());
    }

    #[test]
    fn negative_on_orthant_gives_exact_witness() {
        let f = p("x1^2 - 3*x1*x2 + x2^2", 2);
        let r = check_pos3(&f, &Pos3Options::falsify()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness.unwrap().recheck(&f).unwrap());
    }

    #[test]
    fn single_variable_is_vacuous() {
        let r = check_pos3(&p("x1^5", 1), &Pos3Options::certify()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn options_are_validated() {
        let o = Pos3Options {
            delta: 0.0,
            ..Pos3Options::default()
        };
        assert!(check_pos3(&p("x1+x2", 2), &o).is_err());
    }

    #[test]
    fn canonical_form() {
        let z = [
            GaussianRational::real(crate::poly::ratio(1, 2)),
            GaussianRational::real(crate::poly::ratio(-1, 2)),
        ];
        let r = [crate::poly::ratio(1, 2), crate::poly::ratio(1, 2)];
        let (c, m) = canonical(&z, &r);
        assert_eq!(c[0], GaussianRational::real(int(-1)));
        assert_eq!(c[1], GaussianRational::real(int(1)));
        assert_eq!(m, vec![int(1), int(1)]);
    }
}
