use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polypart::report::Report;
use polypart::{PointSet, Polynomial};
use tempfile::TempDir;

fn polypart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polypart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = polypart(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    stdout(&out)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Sixteen points of a small integer grid with distinct coordinates.
fn sixteen_points() -> String {
    (0..16)
        .map(|i: i64| format!("{} {}\n", (7 * i) % 17, (5 * i * i + 3) % 19))
        .collect()
}

#[test]
fn bounds_prints_the_value() {
    assert_eq!(ok(&["bounds", "chardin_upper", "--deg", "2", "--e", "1", "--ell", "3"]), "8\n");
    assert_eq!(
        ok(&["bounds", "betti_bound", "--degs", "2,3", "--deg-g", "7", "--d", "4"]),
        "294\n"
    );
    let sched = ok(&["bounds", "schedule_variety", "--d", "4", "--delta1", "1", "--delta2", "1", "--ell", "96"]);
    let r = Report::parse(&sched).unwrap();
    assert_eq!(r.get("degrees"), Some("4,5,8"));
    assert_eq!(r.get("eta"), Some("10"));
}

#[test]
fn error_categories_and_exit_codes() {
    let missing = polypart(&["partition", "--points", "/nonexistent/p.txt", "--degree", "4"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).starts_with("error[PARSE]"), "{}", stderr(&missing));

    let usage = polypart(&["partition", "--degree", "4"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(stderr(&usage).starts_with("error[PARSE]"));

    let unknown = polypart(&["bounds", "no_such_bound"]);
    assert_eq!(unknown.status.code(), Some(2));

    let precond = polypart(&[
        "bounds", "prop2_lower", "--d", "4", "--delta1", "3", "--delta2", "2", "--ell", "5",
    ]);
    assert_eq!(precond.status.code(), Some(3));
    assert!(stderr(&precond).starts_with("error[PRECOND]"));
}

#[test]
fn partition_reports_are_reproducible_and_verifiable() {
    let dir = TempDir::new().unwrap();
    let points = write(dir.path(), "p.txt", &sixteen_points());
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for out in [&a, &b] {
        ok(&["partition", "--points", s(&points), "--degree", "4", "--seed", "7", "--out", s(out)]);
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    let (ra, rb) = (Report::parse(&ta).unwrap(), Report::parse(&tb).unwrap());
    for key in ["budget_check", "conservation_ok", "balance_ok"] {
        assert_eq!(ra.get(key), Some("true"), "{key}");
    }
    assert_eq!(ra.get("config.flag.seed"), Some("7"));
    assert_eq!(ra.get("stages"), Some("3"));
    assert!(ra.parsed::<usize>("max_cell").unwrap() <= 2);
    // Only the output path differs between the two runs.
    let strip = |t: &str| t.lines().filter(|l| !l.starts_with("config.out")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&ta), strip(&tb));
    assert_eq!(rb.get("config.out"), Some(s(&b)));

    let verified = ok(&["verify", "--report", s(&a)]);
    assert!(verified.starts_with("report ok"));

    let tampered = write(dir.path(), "t.txt", &ta.replace("stages = 3", "stages = 2"));
    let out = polypart(&["verify", "--report", s(&tampered)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_defaults_to_zero() {
    let dir = TempDir::new().unwrap();
    let points = write(dir.path(), "p.txt", &sixteen_points());
    let report = Report::parse(&ok(&["partition", "--points", s(&points), "--degree", "2"])).unwrap();
    assert_eq!(report.get("config.flag.seed"), Some("0"));
    assert_eq!(report.get("command"), Some("partition"));
}

#[test]
fn hilbert_of_a_conic() {
    let dir = TempDir::new().unwrap();
    let text: String = (-6..=6i64).map(|x| format!("{x} {}\n", x * x)).collect();
    let points = write(dir.path(), "conic.txt", &text);
    let report = Report::parse(&ok(&["hilbert", "--points", s(&points), "--degree", "3"])).unwrap();
    assert_eq!(report.get("value"), Some("7"));
    assert_eq!(report.get("rank_source"), Some("13"));
    assert!(report.get("saturated").is_some());
}

#[test]
fn hamsandwich_emits_a_bisecting_polynomial() {
    let dir = TempDir::new().unwrap();
    let first = write(dir.path(), "a.txt", "0 0\n1 0\n2 1\n3 5\n4 2\n");
    let second = write(dir.path(), "b.txt", "0 3\n1 7\n5 5\n2 2\n");
    let files = format!("{},{}", s(&first), s(&second));
    let text = ok(&["hamsandwich", "--points", &files, "--degree", "1", "--seed", "3"]);
    let g = Polynomial::parse(&text, Some(2)).unwrap();
    assert!(g.degree().unwrap() <= 1);
    for (file, size) in [(&first, 5usize), (&second, 4)] {
        let set = PointSet::parse(&std::fs::read_to_string(file).unwrap(), Some(2)).unwrap();
        let signs: Vec<_> = set.iter().map(|p| g.sign_at(p).unwrap().as_i8()).collect();
        assert!(signs.iter().filter(|&&v| v > 0).count() <= size / 2);
        assert!(signs.iter().filter(|&&v| v < 0).count() <= size / 2);
    }
    assert!(text.contains("# set 1: negative"));
}

#[test]
fn generate_then_count_from_files() {
    let dir = TempDir::new().unwrap();
    let (pts, surf) = (dir.path().join("pts.txt"), dir.path().join("lines.txt"));
    let out = dir.path().join("gen.txt");
    ok(&[
        "generate", "--family", "grid_lines_2d", "--params", "q=3", "--points-out", s(&pts),
        "--surfaces-out", s(&surf), "--out", s(&out),
    ]);
    let gen = Report::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(gen.get("incidences"), Some("18"));
    let report = Report::parse(&ok(&[
        "incidence", "--points", s(&pts), "--surfaces", s(&surf), "--k", "2",
    ]))
    .unwrap();
    assert_eq!(report.get("count"), Some("18"));
    for key in ["m", "n", "k", "bound", "ratio", "branch", "cells"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert!(ok(&["verify", "--report", s(&out)]).starts_with("report ok"));

    std::fs::write(&pts, "0 0\n").unwrap();
    let out = polypart(&["verify", "--report", s(&dir.path().join("gen.txt"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn incidence_family_report_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("inc.txt");
    ok(&["incidence", "--family", "grid_lines_2d", "--params", "q=4", "--seed", "2", "--report", s(&out)]);
    let report = Report::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.get("count"), Some("32"));
    assert_eq!(report.get("config.flag.family"), Some("grid_lines_2d"));
    assert!(ok(&["verify", "--report", s(&out)]).starts_with("report ok"));
}

#[test]
fn partition_on_a_plane_in_four_space() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "eqs.txt", "1 0 0 1 0\n---\n1 0 0 0 1\n");
    write(dir.path(), "param.txt", "1 1 0\n---\n1 0 1\n---\n0 0 0\n---\n0 0 0\n");
    let spec = write(
        dir.path(),
        "plane.var",
        "ambient = 4\ndim = 2\ndegree = 1\ndelta1 = 1\ndelta2 = 1\nequations = eqs.txt\nparametrization = param.txt\nparams = 2\n",
    );
    let text: String = (0..20i64).map(|i| format!("{} {} 0 0\n", (3 * i) % 23, (i * i) % 29)).collect();
    let points = write(dir.path(), "p.txt", &text);
    let out = dir.path().join("r.txt");
    ok(&[
        "partition-variety", "--points", s(&points), "--variety", s(&spec), "--degree", "24",
        "--out", s(&out),
    ]);
    let report = Report::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.get("conservation_ok"), Some("true"));
    assert_eq!(report.get("config.flag.c1"), Some("1/16"));
    assert!(ok(&["verify", "--report", s(&out)]).starts_with("report ok"));

    let off = write(dir.path(), "off.txt", "1 2 3 4\n");
    let bad = polypart(&["partition-variety", "--points", s(&off), "--variety", s(&spec), "--degree", "24"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn quick_self_checks_pass() {
    let text = ok(&["verify"]);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{text}");
}
