//! Reading polynomials, matrices, rationals and points from the command line.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use eventpos::poly::parse;
use eventpos::spectral::PolyMatrix;
use eventpos::{Polynomial, Rational};

use crate::format::{MatrixJson, PolyJson};

/// Largest variable index mentioned in `text` (`x<k>` or `s<k>`), at least 1.
pub fn infer_nvars(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 1;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' || bytes[i] == b's' {
            let start = i + 1;
            let mut j = start;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(k) = text[start..j].parse::<usize>() {
                best = best.max(k);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    best
}

/// Parses an expression with an explicit or inferred variable count.
pub fn parse_expr(text: &str, nvars: Option<usize>) -> Result<Polynomial> {
    let n = nvars.unwrap_or_else(|| infer_nvars(text));
    parse(text, n).map_err(|e| anyhow!("cannot parse '{}': {}", text.trim(), e))
}

/// `arg` is either an expression or a path to a file holding one. Files
/// ending in `.json` use the canonical JSON form.
pub fn read_polynomial(arg: &str, nvars: Option<usize>) -> Result<Polynomial> {
    let path = Path::new(arg);
    if !path.is_file() {
        return parse_expr(arg, nvars);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", arg))?;
    if path.extension().is_some_and(|e| e == "json") {
        let doc: PolyJson =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", arg))?;
        let p = doc.to_polynomial()?;
        if let Some(n) = nvars {
            if n != p.nvars() {
                bail!("{} declares {} variables, expected {}", arg, p.nvars(), n);
            }
        }
        return Ok(p);
    }
    parse_expr(text.trim(), nvars)
}

pub fn read_matrix(path: &Path) -> Result<PolyMatrix> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: MatrixJson = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    doc.to_matrix()
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Ok(r) = Rational::from_str(t) {
        return Ok(r);
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit()) {
            let scaled = format!("{}{}/1{}", whole, frac, "0".repeat(frac.len()));
            if let Ok(r) = Rational::from_str(&scaled) {
                return Ok(r);
            }
        }
    }
    bail!("'{}' is not a rational number", text)
}

/// Comma-separated rationals.
pub fn parse_point(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(parse_rational).collect()
}

/// A list such as `6,7,15/2` or a range `start:stop:step`, sorted ascending
/// with duplicates removed.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [v] => out.push(parse_rational(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_rational(a)?, parse_rational(b)?, parse_rational(step)?);
                if step <= Rational::from_integer(0.into()) {
                    bail!("range step must be positive");
                }
                let mut v = a;
                while v <= b {
                    out.push(v.clone());
                    v += &step;
                }
            }
            _ => bail!("cannot read grid element '{}'", part),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
