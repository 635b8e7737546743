//! Command implementations. Each takes a resolved [`RunConfig`] and returns
//! the report it produces; nothing here writes files.

use std::path::{Path, PathBuf};

use polypart::hamsandwich::{lift_and_bisect, side_counts};
use polypart::incidence::{
    count_incidences, first_level_degree, generate, incidence_bound, run_level1, BoundParams,
    Family, FamilyParams, IncidenceInstance,
};
use polypart::partition::{partition, partition_on_variety, PartitionResult, StageKind, VarietyOptions};
use polypart::poly::{parse_polynomial_list, polynomial_list_to_text};
use polypart::rational::{format_rational, parse_rational};
use polypart::report::Report;
use polypart::variety::VarietySpec;
use polypart::veronese::hilbert_from_points;
use polypart::{Error, PointSet, Polynomial, Result};

use crate::calculators;
use crate::config::RunConfig;

/// Result of one command.
pub struct Outcome {
    pub report: Report,
    /// Printed instead of the report when no output file is given.
    pub display: Option<String>,
    /// Files the command produces, written by the caller.
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn report(report: Report) -> Self {
        Outcome {
            report,
            display: None,
            files: Vec::new(),
        }
    }
}

/// Runs the command named in `config`. Defaults resolved along the way are
/// written back into `config` and embedded in the report.
pub fn dispatch(config: &mut RunConfig) -> Result<Outcome> {
    if !config.has_flag("seed") && config.command != "bounds" {
        config.set_flag("seed", 0);
    }
    let mut outcome = match config.command.as_str() {
        "partition" => run_partition(config)?,
        "partition-variety" => run_partition_variety(config)?,
        "hamsandwich" => run_hamsandwich(config)?,
        "hilbert" => run_hilbert(config)?,
        "bounds" => run_bounds(config)?,
        "incidence" => run_incidence(config)?,
        "generate" => run_generate(config)?,
        other => return Err(Error::parse(0, format!("unknown command `{other}`"))),
    };
    outcome.report.set("command", &config.command);
    config.embed(&mut outcome.report);
    Ok(outcome)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_points(path: &str, dim: Option<usize>) -> Result<PointSet> {
    PointSet::parse(&read_file(path)?, dim)
}

/// Polynomial text on one line, terms separated by `;`.
fn inline_polynomial(p: &Polynomial) -> String {
    p.to_text().lines().collect::<Vec<_>>().join("; ")
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn partition_report(result: &PartitionResult) -> Report {
    let mut r = Report::new();
    let degrees = result.polynomials.iter().map(|g| g.degree().unwrap_or(0));
    r.set("input_size", result.input_size)
        .set("budget", result.budget)
        .set("stages", result.stage_count())
        .set("degrees", join(degrees))
        .set("scheduled_degrees", join(result.stages.iter().map(|s| s.scheduled_degree)))
        .set(
            "stage_kinds",
            join(result.stages.iter().map(|s| match s.kind {
                StageKind::Bisection => "bisection",
                StageKind::Kernel => "kernel",
            })),
        )
        .set("degree_sum", result.product_degree())
        .set("budget_check", result.degree_ok())
        .set("cell_count", result.cell_count())
        .set("cell_sizes", join(result.cells.values().map(PointSet::len)))
        .set("max_cell", result.max_cell())
        .set("balance_bound", result.balance_bound())
        .set("balance_ok", result.balance_ok())
        .set("residue_size", result.residue.len())
        .set("conservation_ok", result.conservation_ok())
        .set("kernel_fallback", result.kernel_fallback())
        .set("truncated", result.truncated);
    for (i, g) in result.polynomials.iter().enumerate() {
        r.set(&format!("polynomial.{}", i + 1), inline_polynomial(g));
    }
    r
}

fn run_partition(config: &RunConfig) -> Result<Outcome> {
    let points = read_points(config.path("points")?, None)?;
    let result = partition(&points, config.num("degree")?, config.seed()?)?;
    Ok(Outcome::report(partition_report(&result)))
}

fn run_partition_variety(config: &mut RunConfig) -> Result<Outcome> {
    let variety = VarietySpec::load(Path::new(config.path("variety")?))?;
    let points = read_points(config.path("points")?, Some(variety.ambient()))?;
    let mut options = VarietyOptions::new(variety.ambient(), config.seed()?);
    if config.has_flag("c1") {
        let raw = config.text("c1")?;
        options.c1 = parse_rational(raw)
            .ok_or_else(|| Error::parse(0, format!("flag `--c1` is not a rational: `{raw}`")))?;
    }
    config.set_flag("c1", format_rational(&options.c1));
    let result = partition_on_variety(&points, &variety, config.num("degree")?, &options)?;
    Ok(Outcome::report(partition_report(&result)))
}

fn run_hamsandwich(config: &RunConfig) -> Result<Outcome> {
    let mut sets: Vec<PointSet> = Vec::new();
    for path in config.path("points")?.split(',').map(str::trim) {
        let dim = sets.first().map(PointSet::dim);
        sets.push(read_points(path, dim)?);
    }
    let g = lift_and_bisect(&sets, config.num("degree")?, config.seed()?)?;
    let counts = side_counts(&g, &sets)?;
    let mut report = Report::new();
    report
        .set("polynomial", inline_polynomial(&g))
        .set("degree", g.degree().unwrap_or(0))
        .set("sets", sets.len());
    let mut display = g.to_text();
    for (i, c) in counts.iter().enumerate() {
        let line = format!("negative {} zero {} positive {}", c.negative, c.zero, c.positive);
        display.push_str(&format!("# set {}: {line}\n", i + 1));
        report.set(&format!("counts.{}", i + 1), line);
    }
    Ok(Outcome {
        report,
        display: Some(display),
        files: Vec::new(),
    })
}

fn run_hilbert(config: &RunConfig) -> Result<Outcome> {
    let points = read_points(config.path("points")?, None)?;
    let est = hilbert_from_points(&points, config.num("degree")?)?;
    let mut report = Report::new();
    report
        .set("value", est.value)
        .set("rank_source", est.rank_source)
        .set("saturated", est.saturated)
        .set("capacity", est.capacity());
    Ok(Outcome::report(report))
}

fn run_bounds(config: &RunConfig) -> Result<Outcome> {
    let name = config.text("calculator")?;
    let mut args = config.flags.clone();
    args.remove("calculator");
    let entries = calculators::evaluate(name, &args)?;
    let mut report = Report::new();
    for (k, v) in &entries {
        report.set(k, v);
    }
    let display = match entries.as_slice() {
        [(k, v)] if k == "value" => format!("{v}\n"),
        _ => report.to_text(),
    };
    Ok(Outcome {
        report,
        display: Some(display),
        files: Vec::new(),
    })
}

fn family_instance(config: &RunConfig) -> Result<IncidenceInstance> {
    let family: Family = config.text("family")?.parse()?;
    let params: FamilyParams = match config.has_flag("params") {
        true => config.text("params")?.parse()?,
        false => FamilyParams::new(),
    };
    generate(family, &params, config.seed()?)
}

fn file_instance(config: &mut RunConfig) -> Result<IncidenceInstance> {
    let points = read_points(config.path("points")?, None)?;
    let surfaces = parse_polynomial_list(&read_file(config.path("surfaces")?)?, Some(points.dim()))?;
    if !config.has_flag("degree_cap") {
        let cap = surfaces.iter().filter_map(Polynomial::degree).max().unwrap_or(1);
        config.set_flag("degree_cap", cap);
    }
    IncidenceInstance::new(points, surfaces, config.num("k")?, config.num("degree_cap")?)
}

fn run_incidence(config: &mut RunConfig) -> Result<Outcome> {
    let inst = if config.has_flag("family") {
        family_instance(config)?
    } else {
        file_instance(config)?
    };
    let report = if inst.dim() == 4 {
        run_level1(&inst, config.seed()?)?.to_report()
    } else {
        plain_incidence_report(&inst)?
    };
    Ok(Outcome::report(report))
}

/// Count against bound without partitioning, for instances outside `R^4`.
fn plain_incidence_report(inst: &IncidenceInstance) -> Result<Report> {
    let params = BoundParams::new(inst.dim() as u32, inst.k())?;
    let (m, n) = (inst.m(), inst.n());
    let count = count_incidences(inst);
    let bound = incidence_bound(m as u64, n as u64, &params);
    let (degree, clamped) = first_level_degree(m as f64, n.max(1) as f64, &params);
    let mut r = Report::new();
    r.set("m", m)
        .set("n", n)
        .set("k", inst.k())
        .set("count", count)
        .set("bound", format!("{bound:.6}"))
        .set("ratio", format!("{:.6}", count as f64 / bound))
        .set("degree", format!("{degree:.6}"))
        .set("branch", if clamped { "clamped" } else { "unclamped" })
        .set("cells", "");
    Ok(r)
}

fn run_generate(config: &RunConfig) -> Result<Outcome> {
    let inst = family_instance(config)?;
    let points_out = PathBuf::from(config.path("points_out")?);
    let surfaces_out = PathBuf::from(config.path("surfaces_out")?);
    let mut report = Report::new();
    report
        .set("dim", inst.dim())
        .set("m", inst.m())
        .set("n", inst.n())
        .set("k", inst.k())
        .set("degree_cap", inst.degree_cap())
        .set("incidences", count_incidences(&inst));
    Ok(Outcome {
        report,
        display: None,
        files: vec![
            (points_out, inst.points().to_text()),
            (surfaces_out, polynomial_list_to_text(inst.surfaces())),
        ],
    })
}
