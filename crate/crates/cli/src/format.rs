//! JSON forms of polynomials, matrices and reports.
//!
//! Rationals are written as strings (`"3"`, `"-7/2"`). Variable, facet and
//! unit-vector indices are 1-based, matching the `x1..xn` names.

use anyhow::{bail, Result};
use eventpos::conditions::{Certificate, ConditionReport, Witness};
use eventpos::eventual::PositivityPattern;
use eventpos::poly::GaussianRational;
use eventpos::spectral::{BetaReport, PolyMatrix};
use eventpos::{MultiIndex, Polynomial, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::input::{parse_expr, parse_rational};

/// Canonical form `{"nvars": n, "terms": [{"exp": [..], "coef": "a/b"}, ..]}`,
/// terms in descending graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: String,
}

impl PolyJson {
    pub fn from_polynomial(p: &Polynomial) -> Self {
        PolyJson {
            nvars: p.nvars(),
            terms: p
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.exponents().to_vec(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<Polynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exp.len() != self.nvars {
                bail!("term {:?} does not have {} exponents", t.exp, self.nvars);
            }
            terms.push((MultiIndex::new(t.exp.clone()), parse_rational(&t.coef)?));
        }
        Ok(Polynomial::from_terms(self.nvars, terms)?)
    }
}

/// `{"dim": k, "nvars": n, "entries": [["expr", ..], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub nvars: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn from_matrix(a: &PolyMatrix) -> Self {
        MatrixJson {
            dim: a.dim(),
            nvars: a.nvars(),
            entries: (0..a.dim())
                .map(|i| (0..a.dim()).map(|j| a.entry(i, j).serialize()).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<PolyMatrix> {
        if self.entries.len() != self.dim {
            bail!("matrix declares dim {} but has {} rows", self.dim, self.entries.len());
        }
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| parse_expr(e, Some(self.nvars))).collect())
            .collect::<Result<Vec<Vec<Polynomial>>>>()?;
        Ok(PolyMatrix::new(rows)?)
    }
}

fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(r.to_string())).collect())
}

fn gaussian(g: &GaussianRational) -> Value {
    json!([g.re.to_string(), g.im.to_string()])
}

pub fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::UnitValues(v) => json!({"kind": "unit_values", "values": rationals(v)}),
        Certificate::PolyaExponents(v) => json!({
            "kind": "polya_exponents",
            "facets": v.iter().map(|(k, e)| json!({"facet": k + 1, "exponent": e})).collect::<Vec<_>>(),
        }),
        Certificate::Pos3(c) => json!({
            "kind": "pos3",
            "delta": c.delta,
            "max_depth": c.max_depth,
            "depth_reached": c.depth_reached,
            "boxes_proved": c.boxes_proved,
            "boxes_near_aligned": c.boxes_near_aligned,
            "jf_points": c.jf_points,
            "jf_all_positive_definite": c.jf_all_positive_definite,
            "vacuous": c.vacuous,
            "resolution_limited": c.resolution_limited,
        }),
    }
}

pub fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::UnitVector { index, point, value } => json!({
            "kind": "unit_vector",
            "index": index + 1,
            "point": rationals(point),
            "value": value.to_string(),
        }),
        Witness::FacetPoint { facet, point, value } => json!({
            "kind": "facet_point",
            "facet": facet + 1,
            "point": rationals(point),
            "value": value.to_string(),
        }),
        Witness::ExactComplex { z, moduli, value, bound } => json!({
            "kind": "exact_complex",
            "z": z.iter().map(gaussian).collect::<Vec<_>>(),
            "moduli": rationals(moduli),
            "value": gaussian(value),
            "bound": bound.to_string(),
        }),
        Witness::FloatComplex { r, theta, gap } => json!({
            "kind": "float_complex",
            "r": r,
            "theta": theta,
            "gap": [gap.lo(), gap.hi()],
        }),
    }
}

/// At most this many unresolved boxes are written out.
pub const MAX_LISTED_BOXES: usize = 16;

pub fn report_json(r: &ConditionReport) -> Value {
    json!({
        "condition": r.condition.to_string(),
        "verdict": r.verdict.to_string(),
        "witness": r.witness.as_ref().map(witness_json),
        "certificate": r.certificate.as_ref().map(certificate_json),
        "budget": {
            "evaluations": r.budget.evaluations,
            "polya_steps": r.budget.polya_steps,
            "boxes": r.budget.boxes,
            "depth_reached": r.budget.depth_reached,
            "refinements": r.budget.refinements,
        },
        "unresolved_count": r.unresolved.len(),
        "unresolved": r.unresolved.iter().take(MAX_LISTED_BOXES).map(|b| json!({
            "r": b.r,
            "theta": b.theta,
            "depth": b.depth,
        })).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

pub fn pattern_json(p: &PositivityPattern) -> Value {
    json!({
        "p": p.p_id,
        "q": p.q_id,
        "window_onset": p.onset,
        "first_true": p.first_true,
        "steps": p.steps.iter().map(|s| json!({
            "m": s.m,
            "all_positive": s.all_positive,
            "num_terms": s.num_terms,
            "min_coef": s.min_coef.to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn beta_json(r: &BetaReport) -> Value {
    json!({
        "verdict": r.verdict.to_string(),
        "irreducible": r.irreducible,
        "aperiodic": r.aperiodic,
        "exact_charpoly_zero": r.exact_charpoly_zero,
        "residual": r.residual.as_ref().map(|p| p.serialize()),
        "integral": r.integral,
        "samples": r.samples.iter().map(|s| json!({
            "point": rationals(&s.point),
            "p_value": s.p_value,
            "perron_value": s.perron_value,
            "gap_to_second_modulus": s.gap_to_second_modulus,
            "agrees": s.agrees,
        })).collect::<Vec<_>>(),
    })
}

/// Short human form of a witness.
pub fn witness_text(w: &Witness) -> String {
    let list = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
    match w {
        Witness::UnitVector { index, value, .. } => format!("p(e{}) = {}", index + 1, value),
        Witness::FacetPoint { facet, point, value } => {
            format!("dp/dx{} = {} at ({}) on facet F{}", facet + 1, value, list(point), facet + 1)
        }
        Witness::ExactComplex { z, value, bound, .. } => {
            let zs: Vec<String> = z.iter().map(gaussian_text).collect();
            format!("z = ({}), p(z) = {}, p(|z|) = {}", zs.join(", "), gaussian_text(value), bound)
        }
        Witness::FloatComplex { r, theta, gap } => {
            format!("r = {:?}, theta = {:?}, gap in {}", r, theta, gap)
        }
    }
}

fn gaussian_text(g: &GaussianRational) -> String {
    use num_traits::{Signed, Zero};
    if g.im.is_zero() {
        g.re.to_string()
    } else if g.re.is_zero() {
        format!("{}i", g.im)
    } else {
        let sign = if g.im.is_negative() { '-' } else { '+' };
        format!("{} {} {}i", g.re, sign, g.im.abs())
    }
}
