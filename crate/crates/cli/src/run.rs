//! The pipelines behind each subcommand. Every run returns a value that can
//! be rendered as text or as JSON; nothing here prints.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use eventpos::conditions::{
    check_pos1, check_pos2_with, check_pos3, Condition, ConditionReport, Verdict,
};
use eventpos::eventual::{polya_search, power_scan_with, PolyaSearch, PositivityPattern};
use eventpos::geometry::{
    difference_lattice, hessian_logf_fd, jf_matrix, newton_affine_dim, LatticeReport,
    SquareMatrix,
};
use eventpos::poly::to_f64;
use eventpos::spectral::{
    is_aperiodic, is_irreducible, verify_beta, BetaReport, BetaVerdict, PolyMatrix,
};
use eventpos::{Polynomial, Rational};
use num_traits::Signed;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::Budgets;
use crate::corpus::{Corpus, Instance};
use crate::format::{beta_json, pattern_json, report_json, witness_text, MatrixJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILS: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Exit code for a set of verdicts: any `Fails` wins over any `Inconclusive`.
pub fn exit_code_for(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v {
            Verdict::Fails => return EXIT_FAILS,
            Verdict::Inconclusive => code = EXIT_INCONCLUSIVE,
            Verdict::Holds => {}
        }
    }
    code
}

#[derive(Clone, Debug)]
pub struct CheckRun {
    pub polynomial: Polynomial,
    pub reports: Vec<ConditionReport>,
}

impl CheckRun {
    pub fn verdict(&self, c: Condition) -> Verdict {
        self.reports
            .iter()
            .find(|r| r.condition == c)
            .map(|r| r.verdict)
            .unwrap_or(Verdict::Inconclusive)
    }

    pub fn report(&self, c: Condition) -> Option<&ConditionReport> {
        self.reports.iter().find(|r| r.condition == c)
    }

    pub fn exit_code(&self) -> i32 {
        exit_code_for(self.reports.iter().map(|r| r.verdict))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "polynomial": self.polynomial.serialize(),
            "nvars": self.polynomial.nvars(),
            "degree": self.polynomial.degree().finite(),
            "reports": self.reports.iter().map(report_json).collect::<Vec<_>>(),
            "exit_code": self.exit_code(),
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p = {}", self.polynomial);
        for r in &self.reports {
            let _ = write!(out, "{}: {}", r.condition, r.verdict);
            if let Some(w) = &r.witness {
                let _ = write!(out, "  [{}]", witness_text(w));
            }
            if !r.unresolved.is_empty() {
                let _ = write!(out, "  [{} unresolved boxes]", r.unresolved.len());
            }
            out.push('\n');
            for n in &r.notes {
                let _ = writeln!(out, "  note: {}", n);
            }
        }
        out
    }
}

/// Pos1, Pos2 and Pos3 in order, each regardless of the others' outcome.
pub fn run_check(p: &Polynomial, budgets: &Budgets) -> Result<CheckRun> {
    let reports = vec![
        check_pos1(p)?,
        check_pos2_with(p, &budgets.pos2_options())?,
        check_pos3(p, &budgets.pos3_options())?,
    ];
    Ok(CheckRun {
        polynomial: p.clone(),
        reports,
    })
}

#[derive(Clone, Debug)]
pub struct ExampleRun {
    pub instance: Instance,
    pub check: CheckRun,
    pub pattern: Option<PositivityPattern>,
    /// Conditions whose verdict did not match.
    pub mismatches: Vec<Condition>,
    pub onset_mismatch: bool,
}

impl ExampleRun {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && !self.onset_mismatch
    }
}

#[derive(Clone, Debug)]
pub struct ExamplesRun {
    pub runs: Vec<ExampleRun>,
}

impl ExamplesRun {
    pub fn exit_code(&self) -> i32 {
        if self.runs.iter().all(ExampleRun::passed) {
            EXIT_OK
        } else {
            EXIT_FAILS
        }
    }

    pub fn to_json(&self) -> Value {
        let runs: Vec<Value> = self
            .runs
            .iter()
            .map(|r| {
                let expected: serde_json::Map<String, Value> = r
                    .instance
                    .expected
                    .iter()
                    .map(|(c, e)| (c.to_string(), Value::String(format!("{:?}", e))))
                    .collect();
                json!({
                    "name": r.instance.name,
                    "entry": r.instance.entry,
                    "notes": r.instance.notes,
                    "expected": expected,
                    "check": r.check.to_json(),
                    "scan": r.pattern.as_ref().map(pattern_json),
                    "mismatches": r.mismatches.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "onset_mismatch": r.onset_mismatch,
                    "passed": r.passed(),
                })
            })
            .collect();
        json!({"examples": runs, "exit_code": self.exit_code()})
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.runs {
            let mark = if r.passed() { "ok  " } else { "FAIL" };
            let verdicts: Vec<String> = r
                .check
                .reports
                .iter()
                .map(|rep| {
                    let exp = r
                        .instance
                        .expected
                        .get(&rep.condition)
                        .map(|e| format!(" (expected {:?})", e))
                        .unwrap_or_default();
                    format!("{} {}{}", rep.condition, rep.verdict, exp)
                })
                .collect();
            let _ = write!(out, "{} {:<24} {}", mark, r.instance.name, verdicts.join(", "));
            if let Some(p) = &r.pattern {
                let onset = p.onset.map(|m| m.to_string()).unwrap_or_else(|| "none".into());
                let _ = write!(out, ", onset {} within m <= {}", onset, p.max_m());
            }
            out.push('\n');
            for rep in &r.check.reports {
                if let Some(w) = &rep.witness {
                    let _ = writeln!(out, "       {} witness: {}", rep.condition, witness_text(w));
                }
            }
        }
        let failed = self.runs.iter().filter(|r| !r.passed()).count();
        let _ = writeln!(out, "{} of {} examples match", self.runs.len() - failed, self.runs.len());
        out
    }
}

pub fn run_example(instance: &Instance, budgets: &Budgets) -> Result<ExampleRun> {
    let check = run_check(&instance.polynomial, budgets)?;
    let mismatches = instance
        .expected
        .iter()
        .filter(|(c, e)| !e.accepts(check.verdict(**c)))
        .map(|(c, _)| *c)
        .collect();
    let (pattern, onset_mismatch) = match (&instance.scan, &instance.q) {
        (Some(spec), Some(q)) => {
            let pat =
                power_scan_with(&instance.polynomial, q, &budgets.scan_options(Some(spec.max_m)))?;
            let bad = spec.onset.as_ref().is_some_and(|o| !o.accepts(pat.onset));
            (Some(pat), bad)
        }
        _ => (None, false),
    };
    Ok(ExampleRun {
        instance: instance.clone(),
        check,
        pattern,
        mismatches,
        onset_mismatch,
    })
}

pub fn run_examples(corpus: &Corpus, name: &str, budgets: &Budgets) -> Result<ExamplesRun> {
    let runs = corpus
        .select(name)?
        .iter()
        .map(|i| run_example(i, budgets))
        .collect::<Result<_>>()?;
    Ok(ExamplesRun { runs })
}

/// `(x1 + x2)^{2k} - lambda * x1^k * x2^k`.
pub fn dv_polynomial(k: u32, lambda: &Rational) -> Result<Polynomial> {
    let sum = &Polynomial::var(2, 0)? + &Polynomial::var(2, 1)?;
    let mono = Polynomial::monomial(vec![k, k].into(), lambda.clone());
    Ok(&sum.pow(2 * k) - &mono)
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub k: u32,
    pub lambda: Rational,
    pub pos1: Verdict,
    pub pos2: Verdict,
    pub pos3: Verdict,
    pub onset: Option<u32>,
    pub max_m: u32,
}

#[derive(Clone, Debug)]
pub struct SweepRun {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

impl SweepRun {
    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "lambda", "pos1", "pos2", "pos3", "onset", "max_m"])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.lambda.to_string(),
                r.pos1.to_string(),
                r.pos2.to_string(),
                r.pos3.to_string(),
                r.onset.map(|m| m.to_string()).unwrap_or_default(),
                r.max_m.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rows": self.rows.iter().map(|r| json!({
                "k": r.k,
                "lambda": r.lambda.to_string(),
                "pos1": r.pos1.to_string(),
                "pos2": r.pos2.to_string(),
                "pos3": r.pos3.to_string(),
                "window_onset": r.onset,
                "max_m": r.max_m,
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

/// Sweeps the `dv` family over `lambdas`, sorted ascending.
pub fn run_sweep(k: u32, lambdas: &[Rational], max_m: u32, budgets: &Budgets) -> Result<SweepRun> {
    if k < 2 {
        bail!("the dv family needs k >= 2");
    }
    let mut lambdas = lambdas.to_vec();
    lambdas.sort();
    lambdas.dedup();
    let upper = Rational::from_integer(num_traits::pow(2u64, 2 * k as usize - 1).into());
    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(lambdas.len());
    let one = Polynomial::one(2);
    for lambda in lambdas {
        if !lambda.is_positive() || lambda > upper {
            warnings.push(format!("lambda = {} lies outside (0, {}]", lambda, upper));
        }
        let p = dv_polynomial(k, &lambda)?;
        let check = run_check(&p, budgets)?;
        let pattern = power_scan_with(&p, &one, &budgets.scan_options(Some(max_m)))?;
        rows.push(SweepRow {
            k,
            lambda,
            pos1: check.verdict(Condition::Pos1),
            pos2: check.verdict(Condition::Pos2),
            pos3: check.verdict(Condition::Pos3),
            onset: pattern.onset,
            max_m,
        });
    }
    Ok(SweepRun { rows, warnings })
}

pub fn scan_csv(p: &PositivityPattern) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "all_positive", "num_terms", "min_coef"])?;
    for s in &p.steps {
        w.write_record([
            s.m.to_string(),
            s.all_positive.to_string(),
            s.num_terms.to_string(),
            s.min_coef.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn render_scan(p: &PositivityPattern) -> String {
    let mut out = String::new();
    for s in &p.steps {
        let _ = writeln!(
            out,
            "m = {:>3}  all_positive = {:<5}  terms = {:>6}  min_coef = {}",
            s.m, s.all_positive, s.num_terms, s.min_coef
        );
    }
    let onset = p.onset.map(|m| m.to_string()).unwrap_or_else(|| "none".into());
    let _ = writeln!(out, "window onset: {} (scanned m <= {})", onset, p.max_m());
    out
}

pub fn run_polya(g: &Polynomial, max_n: u32) -> Result<PolyaSearch> {
    Ok(polya_search(g, max_n)?)
}

pub fn polya_json(g: &Polynomial, s: &PolyaSearch, max_n: u32) -> Value {
    json!({"g": g.serialize(), "exponent": s.exponent, "steps": s.steps, "max_n": max_n})
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryCheck {
    Dim,
    Lattice,
    Jf,
    Hess,
}

#[derive(Clone, Debug)]
pub struct GeometryRun {
    pub f: Polynomial,
    pub dim: Option<usize>,
    pub lattice: Option<LatticeReport>,
    pub point: Option<Vec<Rational>>,
    pub jf: Option<SquareMatrix<Rational>>,
    pub jf_positive_definite: Option<bool>,
    pub hess: Option<SquareMatrix<f64>>,
    pub hess_step: f64,
    /// Largest entrywise gap between `J_f` and the finite-difference Hessian.
    pub hess_gap: Option<f64>,
}

pub fn run_geometry(
    f: &Polynomial,
    checks: &[GeometryCheck],
    point: Option<Vec<Rational>>,
    step: f64,
) -> Result<GeometryRun> {
    let mut run = GeometryRun {
        f: f.clone(),
        dim: None,
        lattice: None,
        point: point.clone(),
        jf: None,
        jf_positive_definite: None,
        hess: None,
        hess_step: step,
        hess_gap: None,
    };
    let needs_point = checks.iter().any(|c| matches!(c, GeometryCheck::Jf | GeometryCheck::Hess));
    if needs_point && point.is_none() {
        bail!("the jf and hess checks need --point");
    }
    for c in checks {
        match c {
            GeometryCheck::Dim => run.dim = Some(newton_affine_dim(f)?),
            GeometryCheck::Lattice => run.lattice = Some(difference_lattice(f)?),
            GeometryCheck::Jf | GeometryCheck::Hess => {
                let s = point.as_ref().expect("checked above");
                if run.jf.is_none() {
                    let m = jf_matrix(f, s)?;
                    run.jf_positive_definite = Some(m.is_positive_definite()?);
                    run.jf = Some(m);
                }
                if *c == GeometryCheck::Hess {
                    let t: Vec<f64> = s.iter().map(|v| to_f64(v).ln()).collect();
                    let h = hessian_logf_fd(f, &t, step)?;
                    let exact = run.jf.as_ref().expect("computed above").map(to_f64);
                    run.hess_gap = Some(exact.max_abs_diff(&h));
                    run.hess = Some(h);
                }
            }
        }
    }
    Ok(run)
}

fn matrix_strings(m: &SquareMatrix<Rational>) -> Vec<Vec<String>> {
    m.rows().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()
}

impl GeometryRun {
    pub fn to_json(&self) -> Value {
        json!({
            "f": self.f.serialize(),
            "nvars": self.f.nvars(),
            "affine_dim": self.dim,
            "lattice": self.lattice.as_ref().map(|l| json!({
                "dim": l.dim,
                "rank": l.rank,
                "invariant_factors": l.invariant_factors.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "full": l.full,
            })),
            "point": self.point.as_ref().map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
            "jf": self.jf.as_ref().map(matrix_strings),
            "jf_positive_definite": self.jf_positive_definite,
            "hessian_fd": self.hess.as_ref().map(|h| h.rows().map(|r| r.to_vec()).collect::<Vec<_>>()),
            "hessian_step": self.hess.as_ref().map(|_| self.hess_step),
            "hessian_max_gap": self.hess_gap,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "f = {}", self.f.serialize_with_prefix('s'));
        if let Some(d) = self.dim {
            let _ = writeln!(out, "Newton polytope affine dimension: {}", d);
        }
        if let Some(l) = &self.lattice {
            let factors: Vec<String> = l.invariant_factors.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                out,
                "difference lattice: rank {} of {}, invariant factors [{}], full = {}",
                l.rank,
                l.dim,
                factors.join(", "),
                l.full
            );
        }
        if let Some(m) = &self.jf {
            let _ = writeln!(out, "J_f = {:?}", matrix_strings(m));
            let _ = writeln!(out, "J_f positive definite: {}", self.jf_positive_definite.unwrap_or(false));
        }
        if let Some(g) = self.hess_gap {
            let _ = writeln!(out, "max |J_f - finite-difference Hessian| = {:.3e} (h = {})", g, self.hess_step);
        }
        out
    }
}

pub fn run_beta(a: &PolyMatrix, p: &Polynomial, samples: usize, tol: f64, seed: u64) -> Result<BetaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(verify_beta(a, p, samples, tol, &mut rng)?)
}

pub fn beta_exit_code(r: &BetaReport) -> i32 {
    match r.verdict {
        BetaVerdict::Verified => EXIT_OK,
        BetaVerdict::Refuted => EXIT_FAILS,
        BetaVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

pub fn render_beta(r: &BetaReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "irreducible: {}, aperiodic: {}", r.irreducible, r.aperiodic);
    match &r.residual {
        Some(res) => {
            let _ = writeln!(out, "det(p I - A) = {}", res);
        }
        None => {
            let _ = writeln!(out, "det(p I - A): matrix too large for the exact determinant");
        }
    }
    let agreeing = r.samples.iter().filter(|s| s.agrees).count();
    let _ = writeln!(out, "samples agreeing: {} of {}", agreeing, r.samples.len());
    if !r.integral {
        let _ = writeln!(out, "note: p has non-integer coefficients");
    }
    let _ = writeln!(out, "verdict: {}", r.verdict);
    out
}

/// From `p` satisfying all three conditions to the `1 x 1` matrix `(p^m)`:
/// the least `m >= 1` with `p^m` all-positive, and a check that
/// `beta_{(p^m)} = p^m`.
#[derive(Clone, Debug)]
pub struct CertificateRun {
    pub check: CheckRun,
    pub m: Option<u32>,
    pub matrix: Option<PolyMatrix>,
    pub irreducible: bool,
    pub aperiodic: bool,
    pub beta: Option<BetaReport>,
}

impl CertificateRun {
    pub fn exit_code(&self) -> i32 {
        match (&self.beta, self.check.exit_code()) {
            (_, EXIT_FAILS) => EXIT_FAILS,
            (Some(b), _) if self.irreducible && self.aperiodic => beta_exit_code(b),
            _ => EXIT_INCONCLUSIVE,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check.to_json(),
            "m": self.m,
            "matrix": self.matrix.as_ref().map(MatrixJson::from_matrix),
            "irreducible": self.irreducible,
            "aperiodic": self.aperiodic,
            "beta": self.beta.as_ref().map(beta_json),
            "exit_code": self.exit_code(),
        })
    }

    pub fn render(&self) -> String {
        let mut out = self.check.render();
        match (&self.m, &self.beta) {
            (Some(m), Some(b)) => {
                let _ = writeln!(out, "p^{} has all positive coefficients", m);
                let _ = writeln!(
                    out,
                    "B = (p^{}): irreducible {}, aperiodic {}, beta_B = p^{}: {}",
                    m, self.irreducible, self.aperiodic, m, b.verdict
                );
            }
            _ => {
                let _ = writeln!(out, "no all-positive power found in the scan window");
            }
        }
        out
    }
}

pub fn run_certificate(p: &Polynomial, budgets: &Budgets, seed: u64) -> Result<CertificateRun> {
    let check = run_check(p, budgets)?;
    let pattern = power_scan_with(p, &Polynomial::one(p.nvars()), &budgets.scan_options(None))?;
    let m = pattern.steps.iter().find(|s| s.m >= 1 && s.all_positive).map(|s| s.m);
    let mut out = CertificateRun {
        check,
        m,
        matrix: None,
        irreducible: false,
        aperiodic: false,
        beta: None,
    };
    if let Some(m) = m {
        let pm = p.pow(m);
        let b = PolyMatrix::single(pm.clone())?;
        out.irreducible = is_irreducible(&b);
        out.aperiodic = is_aperiodic(&b);
        out.beta = Some(run_beta(&b, &pm, budgets.beta.samples, budgets.beta.tol, seed)?);
        out.matrix = Some(b);
    }
    Ok(out)
}
