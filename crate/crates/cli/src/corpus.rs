//! The example corpus: named polynomials with their expected verdicts.
//!
//! An entry whose polynomial mentions `{name}` placeholders is a family; it
//! expands into one instance per combination of the listed parameter values.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use eventpos::conditions::{Condition, Verdict};
use eventpos::Polynomial;
use serde::Deserialize;

use crate::input::parse_expr;

const BUILTIN: &str = include_str!("../data/corpus.toml");

/// What an entry expects from one condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Expect {
    Holds,
    Fails,
    Inconclusive,
    /// `Holds` or `Inconclusive`: the condition is known to hold but the
    /// checker may not be able to certify it.
    NotFails,
}

impl Expect {
    pub fn accepts(self, v: Verdict) -> bool {
        match self {
            Expect::Holds => v == Verdict::Holds,
            Expect::Fails => v == Verdict::Fails,
            Expect::Inconclusive => v == Verdict::Inconclusive,
            Expect::NotFails => v != Verdict::Fails,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum OnsetExpect {
    Exactly(u32),
    Word(OnsetWord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnsetWord {
    Finite,
    None,
}

impl OnsetExpect {
    pub fn accepts(&self, onset: Option<u32>) -> bool {
        match self {
            OnsetExpect::Exactly(m) => onset == Some(*m),
            OnsetExpect::Word(OnsetWord::Finite) => onset.is_some(),
            OnsetExpect::Word(OnsetWord::None) => onset.is_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default = "one")]
    pub q: String,
    pub max_m: u32,
    pub onset: Option<OnsetExpect>,
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    pub nvars: usize,
    pub polynomial: String,
    #[serde(default)]
    pub params: BTreeMap<String, Vec<String>>,
    /// Keyed by `Pos1`, `Pos2`, `Pos3`.
    #[serde(default)]
    pub expected: BTreeMap<String, Expect>,
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub notes: String,
}

/// One concrete polynomial from an entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub entry: String,
    pub polynomial: Polynomial,
    pub q: Option<Polynomial>,
    pub expected: BTreeMap<Condition, Expect>,
    pub scan: Option<ScanSpec>,
    pub notes: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub entry: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn builtin() -> Self {
        Corpus::from_toml(BUILTIN).expect("built-in corpus is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Corpus = toml::from_str(text).context("parsing corpus")?;
        let mut seen = std::collections::BTreeSet::new();
        for e in &c.entry {
            if !seen.insert(e.name.as_str()) {
                bail!("duplicate corpus entry '{}'", e.name);
            }
            for key in e.expected.keys() {
                condition(key).with_context(|| format!("entry '{}'", e.name))?;
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Corpus::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entry.iter().map(|e| e.name.as_str()).collect()
    }

    /// Instances of the entry called `name`, or of every entry for `"all"`.
    pub fn select(&self, name: &str) -> Result<Vec<Instance>> {
        let chosen: Vec<&CorpusEntry> = if name == "all" {
            self.entry.iter().collect()
        } else {
            match self.entry.iter().find(|e| e.name == name) {
                Some(e) => vec![e],
                None => bail!("unknown example '{}' (known: {})", name, self.names().join(", ")),
            }
        };
        let mut out = Vec::new();
        for e in chosen {
            out.extend(e.instances()?);
        }
        Ok(out)
    }
}

pub fn condition(name: &str) -> Result<Condition> {
    Ok(match name {
        "Pos1" => Condition::Pos1,
        "Pos2" => Condition::Pos2,
        "Pos3" => Condition::Pos3,
        _ => bail!("unknown condition '{}'", name),
    })
}

impl CorpusEntry {
    pub fn instances(&self) -> Result<Vec<Instance>> {
        let mut combos: Vec<Vec<(&str, &str)>> = vec![Vec::new()];
        for (key, values) in &self.params {
            if values.is_empty() {
                bail!("parameter '{}' of '{}' has no values", key, self.name);
            }
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.push((key.as_str(), v.as_str()));
                        c
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .map(|binding| {
                let mut text = self.polynomial.clone();
                for (k, v) in &binding {
                    text = text.replace(&format!("{{{}}}", k), &format!("({})", v));
                }
                if text.contains('{') {
                    bail!("unbound parameter in '{}'", self.name);
                }
                let name = if binding.is_empty() {
                    self.name.clone()
                } else {
                    let args: Vec<String> =
                        binding.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
                    format!("{}[{}]", self.name, args.join(","))
                };
                let polynomial = parse_expr(&text, Some(self.nvars))
                    .with_context(|| format!("corpus entry '{}'", name))?;
                let q = match &self.scan {
                    Some(s) => Some(parse_expr(&s.q, Some(self.nvars))?),
                    None => None,
                };
                Ok(Instance {
                    name,
                    entry: self.name.clone(),
                    polynomial,
                    q,
                    expected: self
                        .expected
                        .iter()
                        .map(|(k, v)| Ok((condition(k)?, *v)))
                        .collect::<Result<_>>()?,
                    scan: self.scan.clone(),
                    notes: self.notes.clone(),
                })
            })
            .collect()
    }
}
