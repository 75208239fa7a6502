use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eventpos_cli::config::{resolve, Budgets, ConfigFile, Mode};
use eventpos_cli::corpus::Corpus;
use eventpos_cli::format::{beta_json, pattern_json};
use eventpos_cli::input::{parse_grid, parse_point, read_matrix, read_polynomial};
use eventpos_cli::run::{self, GeometryCheck, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK};
use eventpos::eventual::power_scan_with;
use serde_json::{json, Value};

/// Exact tools for homogeneous polynomials whose large powers have all
/// positive coefficients.
///
/// Exit codes: 0 all conditions hold (or the command succeeded), 1 input or
/// usage error, 2 a condition fails or an expectation is refuted, 3 some
/// verdict is inconclusive within budget.
#[derive(Parser, Debug)]
#[command(name = "eventpos", version)]
struct Cli {
    /// Write a JSON report to PATH (`-` for standard output).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<String>,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Budget profile: fast, default or thorough.
    #[arg(long, global = true, value_name = "NAME")]
    budget_profile: Option<String>,
    /// TOML file with `profile`, `seed`, `threads` and `[budgets.*]` tables.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide Pos1, Pos2 and Pos3 for a homogeneous polynomial.
    Check(CheckArgs),
    /// Positivity flags of p^m * q for m = 0..=max_m.
    PowerScan(ScanArgs),
    /// Least N with (x1 + ... + xn)^N * g all-positive.
    Polya(PolyaArgs),
    /// Newton polytope dimension, difference lattice, J_f and its
    /// finite-difference cross-check.
    Geometry(GeometryArgs),
    /// Perron root checks for matrices over Z+[x].
    Beta {
        #[command(subcommand)]
        command: BetaCommand,
    },
    /// Verdicts and window onsets across a polynomial family.
    Sweep(SweepArgs),
    /// Run corpus entries and compare against their expected verdicts.
    Examples(ExamplesArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Expression, or a file holding one (`.json` for the canonical form).
    expr: String,
    /// Number of variables (default: largest index that appears).
    #[arg(long)]
    nvars: Option<usize>,
    #[command(flatten)]
    pos3: Pos3Flags,
    #[arg(long)]
    polya_budget: Option<u32>,
}

#[derive(Args, Debug, Default)]
struct Pos3Flags {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    max_boxes: Option<u64>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    grid: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Certify,
    Falsify,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    p: String,
    #[arg(long, default_value = "1")]
    q: String,
    #[arg(long)]
    nvars: Option<usize>,
    #[arg(long)]
    max_m: Option<u32>,
    /// Also write the steps as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolyaArgs {
    #[arg(long)]
    g: String,
    #[arg(long)]
    nvars: Option<usize>,
    #[arg(long)]
    max_n: Option<u32>,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    /// Polynomial in x or s variables.
    #[arg(long)]
    f: String,
    #[arg(long)]
    nvars: Option<usize>,
    /// Comma-separated positive rationals, needed by `jf` and `hess`.
    #[arg(long)]
    point: Option<String>,
    /// Checks to run (default: dim and lattice, plus jf and hess with --point).
    #[arg(long, value_enum, value_delimiter = ',')]
    check: Vec<CheckKind>,
    /// Finite-difference step for `hess`.
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckKind {
    Dim,
    Lattice,
    Jf,
    Hess,
}

#[derive(Subcommand, Debug)]
enum BetaCommand {
    /// Check p = beta_A for a matrix file.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Build and verify the 1x1 matrix (p^m) for a polynomial that passes
    /// all three conditions.
    Certificate {
        #[arg(long)]
        p: String,
        #[arg(long)]
        nvars: Option<usize>,
        #[arg(long)]
        max_m: Option<u32>,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value = "dv")]
    family: String,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Comma-separated values and `start:stop:step` ranges.
    #[arg(long)]
    lambda: String,
    #[arg(long)]
    max_m: Option<u32>,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExamplesArgs {
    /// Entry name, or `all`.
    #[arg(default_value = "all")]
    name: String,
    /// Corpus file (default: the built-in corpus).
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// List entry names and exit.
    #[arg(long)]
    list: bool,
}

struct Settings {
    budgets: Budgets,
    profile: String,
    seed: u64,
    threads: Option<usize>,
}

fn settings(cli: &Cli) -> Result<Settings> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let profile = cli
        .budget_profile
        .clone()
        .or(file.profile.clone())
        .unwrap_or_else(|| "default".into());
    let budgets = resolve(&profile, file.budgets.as_ref())?;
    Ok(Settings {
        budgets,
        profile,
        seed: cli.seed.or(file.seed).unwrap_or(0),
        threads: cli.threads.or(file.threads),
    })
}

fn apply_pos3(b: &mut Budgets, f: &Pos3Flags) {
    if let Some(m) = f.mode {
        b.pos3.mode = match m {
            ModeArg::Certify => Mode::Certify,
            ModeArg::Falsify => Mode::Falsify,
        };
    }
    if let Some(v) = f.max_boxes {
        b.pos3.max_boxes = v;
    }
    if let Some(v) = f.max_depth {
        b.pos3.max_depth = v;
    }
    if let Some(v) = f.delta {
        b.pos3.delta = v;
    }
    if let Some(v) = f.grid {
        b.pos3.grid = v;
    }
}

/// Text for standard output, the JSON result and the exit code.
type Outcome = (String, Value, i32);

fn execute(cli: &Cli, s: &mut Settings) -> Result<Outcome> {
    match &cli.command {
        Command::Check(a) => {
            apply_pos3(&mut s.budgets, &a.pos3);
            if let Some(v) = a.polya_budget {
                s.budgets.pos2.polya_budget = v;
            }
            let p = read_polynomial(&a.expr, a.nvars)?;
            let r = run::run_check(&p, &s.budgets)?;
            Ok((r.render(), r.to_json(), r.exit_code()))
        }
        Command::PowerScan(a) => {
            let p = read_polynomial(&a.p, a.nvars)?;
            let q = read_polynomial(&a.q, Some(a.nvars.unwrap_or(p.nvars())))?;
            let pat = power_scan_with(&p, &q, &s.budgets.scan_options(a.max_m))?;
            if let Some(path) = &a.csv {
                fs::write(path, run::scan_csv(&pat)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok((run::render_scan(&pat), pattern_json(&pat), EXIT_OK))
        }
        Command::Polya(a) => {
            let g = read_polynomial(&a.g, a.nvars)?;
            let max_n = a.max_n.unwrap_or(s.budgets.polya.max_exponent);
            let r = run::run_polya(&g, max_n)?;
            let text = match r.exponent {
                Some(n) => format!("Polya exponent: {}\n", n),
                None => format!("no Polya exponent up to {}\n", max_n),
            };
            let code = if r.exponent.is_some() { EXIT_OK } else { EXIT_INCONCLUSIVE };
            Ok((text, run::polya_json(&g, &r, max_n), code))
        }
        Command::Geometry(a) => {
            let f = read_polynomial(&a.f, a.nvars)?;
            let point = a.point.as_deref().map(parse_point).transpose()?;
            let mut checks: Vec<GeometryCheck> = a
                .check
                .iter()
                .map(|c| match c {
                    CheckKind::Dim => GeometryCheck::Dim,
                    CheckKind::Lattice => GeometryCheck::Lattice,
                    CheckKind::Jf => GeometryCheck::Jf,
                    CheckKind::Hess => GeometryCheck::Hess,
                })
                .collect();
            if checks.is_empty() {
                checks = vec![GeometryCheck::Dim, GeometryCheck::Lattice];
                if point.is_some() {
                    checks.extend([GeometryCheck::Jf, GeometryCheck::Hess]);
                }
            }
            let r = run::run_geometry(&f, &checks, point, a.step)?;
            Ok((r.render(), r.to_json(), EXIT_OK))
        }
        Command::Beta { command } => match command {
            BetaCommand::Verify { matrix, p, samples, tol } => {
                let a = read_matrix(matrix)?;
                let p = read_polynomial(p, Some(a.nvars()))?;
                let samples = samples.unwrap_or(s.budgets.beta.samples);
                let tol = tol.unwrap_or(s.budgets.beta.tol);
                let r = run::run_beta(&a, &p, samples, tol, s.seed)?;
                Ok((run::render_beta(&r), beta_json(&r), run::beta_exit_code(&r)))
            }
            BetaCommand::Certificate { p, nvars, max_m } => {
                let p = read_polynomial(p, *nvars)?;
                if let Some(m) = max_m {
                    s.budgets.scan.max_m = *m;
                }
                let r = run::run_certificate(&p, &s.budgets, s.seed)?;
                Ok((r.render(), r.to_json(), r.exit_code()))
            }
        },
        Command::Sweep(a) => {
            if a.family != "dv" {
                anyhow::bail!("unknown family '{}' (known: dv)", a.family);
            }
            let lambdas = parse_grid(&a.lambda)?;
            let max_m = a.max_m.unwrap_or(s.budgets.scan.max_m);
            let r = run::run_sweep(a.k, &lambdas, max_m, &s.budgets)?;
            for w in &r.warnings {
                eprintln!("warning: {}", w);
            }
            let csv = r.csv()?;
            let text = match &a.csv {
                Some(path) => {
                    fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
                    format!("wrote {} rows to {}\n", r.rows.len(), path.display())
                }
                None => csv,
            };
            Ok((text, r.to_json(), EXIT_OK))
        }
        Command::Examples(a) => {
            let corpus = match &a.corpus {
                Some(p) => Corpus::load(p)?,
                None => Corpus::builtin(),
            };
            if a.list {
                let mut text = String::new();
                for e in &corpus.entry {
                    text.push_str(&format!("{:<20} {}\n", e.name, e.notes));
                }
                let names: Vec<&str> = corpus.names();
                return Ok((text, json!({ "entries": names }), EXIT_OK));
            }
            let r = run::run_examples(&corpus, &a.name, &s.budgets)?;
            Ok((r.render(), r.to_json(), r.exit_code()))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check(_) => "check",
        Command::PowerScan(_) => "power-scan",
        Command::Polya(_) => "polya",
        Command::Geometry(_) => "geometry",
        Command::Beta { command: BetaCommand::Verify { .. } } => "beta verify",
        Command::Beta { command: BetaCommand::Certificate { .. } } => "beta certificate",
        Command::Sweep(_) => "sweep",
        Command::Examples(_) => "examples",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match main_inner(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn main_inner(cli: &Cli) -> Result<i32> {
    let mut s = settings(cli)?;
    if let Some(k) = s.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let start = Instant::now();
    let (text, result, code) = execute(cli, &mut s)?;
    let elapsed = start.elapsed();
    let to_stdout = cli.json.as_deref() == Some("-");
    if !to_stdout {
        print!("{}", text);
    }
    if let Some(target) = &cli.json {
        let doc = json!({
            "metadata": {
                "tool": "eventpos",
                "version": env!("CARGO_PKG_VERSION"),
                "command": command_name(&cli.command),
                "profile": s.profile,
                "seed": s.seed,
                "threads": s.threads,
                "elapsed_ms": elapsed.as_secs_f64() * 1e3,
            },
            "budgets": serde_json::to_value(&s.budgets)?,
            "result": result,
        });
        let body = serde_json::to_string_pretty(&doc)? + "\n";
        if to_stdout {
            print!("{}", body);
        } else {
            fs::write(target, body).with_context(|| format!("writing {}", target))?;
        }
    }
    Ok(code)
}
