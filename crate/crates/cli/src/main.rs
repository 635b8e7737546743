//! `polypart`: partition point sets, bisect them, and check incidence bounds.
//!
//! Every command prints (or writes with `--out`) a `key = value` report that
//! embeds its resolved configuration, so `polypart verify --report <file>`
//! can rerun it and compare. Failures print `error[CATEGORY]: message` on
//! stderr, where the category is PARSE, PRECOND or SEARCH.

mod calculators;
mod commands;
mod config;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use polypart::report::Report;
use polypart::{Error, ErrorCategory, Result};

use crate::commands::{dispatch, read_file};
use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "polypart", version, about = "Polynomial partitioning of finite point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print timing to stderr.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition a point file by polynomials of total degree at most `--degree`.
    Partition {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Partition points lying on a variety described by a variety file.
    PartitionVariety {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        variety: PathBuf,
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Schedule constant, a rational in (0, 2^-d]; defaults to 2^-d.
        #[arg(long)]
        c1: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// One polynomial bisecting every listed point set.
    Hamsandwich {
        /// Comma-separated point files, one set each.
        #[arg(long)]
        points: String,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Hilbert function of a point set at one degree.
    Hilbert {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a named bound calculator, e.g. `bounds chardin_upper --deg 2 --e 1 --ell 3`.
    Bounds {
        calculator: String,
        /// Named arguments as `--name value` pairs.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Incidence count against its bound, for a generated family or given files.
    Incidence {
        #[arg(long, conflicts_with_all = ["points", "surfaces"])]
        family: Option<String>,
        /// Family parameters as `k=v,...`.
        #[arg(long, requires = "family")]
        params: Option<String>,
        #[arg(long, requires = "surfaces")]
        points: Option<PathBuf>,
        #[arg(long, requires = "points")]
        surfaces: Option<PathBuf>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        degree_cap: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Write a generated incidence instance to a point file and a surface file.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        points_out: PathBuf,
        #[arg(long)]
        surfaces_out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Rerun a report and compare, or run the built-in checks.
    Verify {
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also run the long checks (minutes).
        #[arg(long, conflicts_with = "report")]
        full: bool,
    },
}

enum Action {
    Run(RunConfig),
    Verify(PathBuf),
    Suites(bool),
}

fn named_args(raw: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(flag) = it.next() {
        let name = flag
            .strip_prefix("--")
            .ok_or_else(|| Error::parse(0, format!("expected `--name`, got `{flag}`")))?;
        let (name, value) = match name.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::parse(0, format!("`{flag}` needs a value")))?;
                (name.to_string(), v.clone())
            }
        };
        out.push((name.replace('-', "_"), value));
    }
    Ok(out)
}

fn action(command: Command) -> Result<Action> {
    let config = match command {
        Command::Partition { points, degree, seed, common } => RunConfig::new("partition")
            .input("points", Some(points))
            .flag("degree", Some(degree))
            .flag("seed", seed)
            .output(common.out, common.verbose),
        Command::PartitionVariety { points, variety, degree, seed, c1, common } => {
            RunConfig::new("partition-variety")
                .input("points", Some(points))
                .input("variety", Some(variety))
                .flag("degree", Some(degree))
                .flag("seed", seed)
                .flag("c1", c1)
                .output(common.out, common.verbose)
        }
        Command::Hamsandwich { points, degree, seed, common } => RunConfig::new("hamsandwich")
            .input("points", Some(points))
            .flag("degree", Some(degree))
            .flag("seed", seed)
            .output(common.out, common.verbose),
        Command::Hilbert { points, degree, common } => RunConfig::new("hilbert")
            .input("points", Some(points))
            .flag("degree", Some(degree))
            .output(common.out, common.verbose),
        Command::Bounds { calculator, args } => {
            let mut config = RunConfig::new("bounds").flag("calculator", Some(calculator));
            for (name, value) in named_args(&args)? {
                if name == "out" {
                    config.out = Some(PathBuf::from(value));
                } else if name == "calculator" || config.has_flag(&name) {
                    return Err(Error::parse(0, format!("argument `--{name}` given twice")));
                } else {
                    config.set_flag(&name, value);
                }
            }
            config
        }
        Command::Incidence { family, params, points, surfaces, k, degree_cap, seed, report, verbose } => {
            if family.is_none() && points.is_none() {
                return Err(Error::parse(0, "incidence needs `--family` or `--points` with `--surfaces`"));
            }
            if points.is_some() && k.is_none() {
                return Err(Error::parse(0, "`--points` needs `--k`"));
            }
            RunConfig::new("incidence")
                .input("points", points)
                .input("surfaces", surfaces)
                .flag("family", family)
                .flag("params", params)
                .flag("k", k)
                .flag("degree_cap", degree_cap)
                .flag("seed", seed)
                .output(report, verbose)
        }
        Command::Generate { family, params, seed, points_out, surfaces_out, common } => {
            RunConfig::new("generate")
                .input("points_out", Some(points_out))
                .input("surfaces_out", Some(surfaces_out))
                .flag("family", Some(family))
                .flag("params", params)
                .flag("seed", seed)
                .output(common.out, common.verbose)
        }
        Command::Verify { report: Some(path), .. } => return Ok(Action::Verify(path)),
        Command::Verify { full, .. } => return Ok(Action::Suites(full)),
    };
    Ok(Action::Run(config))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(mut config: RunConfig) -> Result<()> {
    let start = Instant::now();
    let outcome = dispatch(&mut config)?;
    for (path, text) in &outcome.files {
        write_file(path, text)?;
    }
    let text = outcome.report.to_text();
    match &config.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{}", outcome.display.as_deref().unwrap_or(&text)),
    }
    if config.verbose {
        eprintln!("{} finished in {:.3?}", config.command, start.elapsed());
    }
    Ok(())
}

/// Reruns the configuration embedded in a report. The rerun must reproduce
/// the report byte for byte (and any files it names), and every `*_ok` or
/// `budget_check` entry must read `true`.
fn verify_report(path: &Path) -> Result<()> {
    let text = read_file(path)?;
    let report = Report::parse(&text)?;
    let failed: Vec<&str> = report
        .keys()
        .filter(|k| (k.ends_with("_ok") || *k == "budget_check") && report.get(k) != Some("true"))
        .collect();
    if !failed.is_empty() {
        return Err(Error::precondition(format!("report entries not true: {}", failed.join(", "))));
    }
    let mut config = RunConfig::from_report(&report)?;
    let outcome = dispatch(&mut config)?;
    if outcome.report.to_text() != text {
        let differing: Vec<&str> = outcome
            .report
            .keys()
            .chain(report.keys())
            .filter(|k| outcome.report.get(k) != report.get(k))
            .collect();
        return Err(Error::precondition(format!(
            "rerun does not reproduce the report (differs at: {})",
            differing.join(", ")
        )));
    }
    for (file, expected) in &outcome.files {
        if read_file(file)? != *expected {
            return Err(Error::precondition(format!(
                "{} does not match its regenerated contents",
                file.display()
            )));
        }
    }
    println!("report ok: {} ({} entries)", path.display(), report.len());
    Ok(())
}

fn run_suites(full: bool) -> Result<()> {
    let results = suites::run(full);
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let detail = if r.detail.is_empty() { String::new() } else { format!(": {}", r.detail) };
        println!("{verdict} {} ({:.2?}){detail}", r.name, r.elapsed);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Error::precondition(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Parse => 2,
        ErrorCategory::Precond => 3,
        ErrorCategory::Search => 4,
    }
}

fn fail(category: ErrorCategory, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error[{}]: {message}", category.as_str());
    ExitCode::from(exit_code(category))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            return fail(ErrorCategory::Parse, e.to_string().trim_end());
        }
    };
    let result = action(cli.command).and_then(|a| match a {
        Action::Run(config) => run(config),
        Action::Verify(path) => verify_report(&path),
        Action::Suites(full) => run_suites(full),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.category(), &e),
    }
}
