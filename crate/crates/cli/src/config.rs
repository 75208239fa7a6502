//! Budget profiles and the TOML configuration file.
//!
//! Resolution order: the `default` profile, then the selected profile, then
//! the config file's `[budgets]` tables, then command-line flags.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use eventpos::conditions::{Pos2Options, Pos3Mode, Pos3Options};
use eventpos::eventual::ScanOptions;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

const PROFILES: &str = include_str!("../data/profiles.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Certify,
    Falsify,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pos2Budget {
    pub polya_budget: u32,
    pub grid: u32,
    pub max_samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pos3Budget {
    pub mode: Mode,
    pub grid: u32,
    pub max_depth: u32,
    pub delta: f64,
    pub tolerance: f64,
    pub max_evals: u64,
    pub max_boxes: u64,
    pub jf_samples: u32,
    pub refine_starts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBudget {
    pub max_m: u32,
    pub max_coefficients: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyaBudget {
    pub max_exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaBudget {
    pub samples: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    pub pos2: Pos2Budget,
    pub pos3: Pos3Budget,
    pub scan: ScanBudget,
    pub polya: PolyaBudget,
    pub beta: BetaBudget,
}

impl Budgets {
    pub fn profile(name: &str) -> Result<Self> {
        resolve(name, None)
    }

    pub fn pos2_options(&self) -> Pos2Options {
        Pos2Options {
            polya_budget: self.pos2.polya_budget,
            grid: self.pos2.grid,
            max_samples: self.pos2.max_samples,
        }
    }

    pub fn pos3_options(&self) -> Pos3Options {
        let b = &self.pos3;
        Pos3Options {
            mode: match b.mode {
                Mode::Certify => Pos3Mode::Certify,
                Mode::Falsify => Pos3Mode::Falsify,
            },
            grid: b.grid,
            max_depth: b.max_depth,
            delta: b.delta,
            tolerance: b.tolerance,
            max_evals: b.max_evals,
            max_boxes: b.max_boxes,
            jf_samples: b.jf_samples,
            refine_starts: b.refine_starts,
        }
    }

    pub fn scan_options(&self, max_m: Option<u32>) -> ScanOptions {
        ScanOptions {
            max_m: max_m.unwrap_or(self.scan.max_m),
            max_coefficients: self.scan.max_coefficients as u128,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub profile: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub budgets: Option<Table>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub fn profile_names() -> Vec<String> {
    let table: Table = PROFILES.parse().expect("built-in profiles are valid TOML");
    table.keys().cloned().collect()
}

/// Budgets for `profile` with `overrides` merged on top.
pub fn resolve(profile: &str, overrides: Option<&Table>) -> Result<Budgets> {
    let all: Table = PROFILES.parse().expect("built-in profiles are valid TOML");
    let base = all
        .get("default")
        .and_then(Value::as_table)
        .cloned()
        .expect("default profile present");
    let selected = match all.get(profile).and_then(Value::as_table) {
        Some(t) => t,
        None => bail!(
            "unknown budget profile '{}' (known: {})",
            profile,
            profile_names().join(", ")
        ),
    };
    let mut merged = base;
    merge(&mut merged, selected);
    if let Some(o) = overrides {
        merge(&mut merged, o);
    }
    Value::Table(merged)
        .try_into()
        .context("invalid budget settings")
}

fn merge(into: &mut Table, from: &Table) {
    for (k, v) in from {
        match (into.get_mut(k), v) {
            (Some(Value::Table(a)), Value::Table(b)) => merge(a, b),
            _ => {
                into.insert(k.clone(), v.clone());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_resolve() {
        let d = Budgets::profile("default").unwrap();
        assert_eq!(d.pos3_options(), Pos3Options::default());
        assert_eq!(d.pos2_options(), Pos2Options::default());
        let f = Budgets::profile("fast").unwrap();
        assert!(f.pos3.max_boxes < d.pos3.max_boxes);
        assert_eq!(f.pos3.delta, d.pos3.delta);
        assert!(Budgets::profile("bogus").is_err());
    }

    #[test]
    fn overrides_apply() {
        let o: Table = "[pos3]\nmax_boxes = 7\nmode = \"falsify\"".parse().unwrap();
        let b = resolve("thorough", Some(&o)).unwrap();
        assert_eq!(b.pos3.max_boxes, 7);
        assert_eq!(b.pos3.mode, Mode::Falsify);
        assert_eq!(b.pos3.grid, 64);
        let bad: Table = "[pos3]\nmax_box = 7".parse().unwrap();
        assert!(resolve("default", Some(&bad)).is_err());
    }
}
