//! Built-in self-checks run by `verify` when no report is given.

use std::time::{Duration, Instant};

use polypart::hamsandwich::{bisect, BisectionProblem, Cut};
use polypart::incidence::{count_incidences, generate, run_level1, Family, FamilyParams};
use polypart::partition::{partition, partition_on_variety, VarietyOptions};
use polypart::rational::{frac, int};
use polypart::variety::coordinate_subspace;
use polypart::veronese::hilbert_from_points;
use polypart::{Point, PointSet, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculators::evaluate;

pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Check = fn() -> Result<std::result::Result<(), String>>;

const QUICK: &[(&str, Check)] = &[
    ("hilbert-conic", hilbert_conic),
    ("bound-calculators", bound_calculators),
    ("variety-schedule", variety_schedule),
    ("grid-incidences", grid_incidences),
];

const FULL: &[(&str, Check)] = &[
    ("hamsandwich-contract", hamsandwich_contract),
    ("plane-partition", plane_partition),
    ("variety-partition", variety_partition),
    ("level1-quadrics", level1_quadrics),
];

pub fn run(full: bool) -> Vec<SuiteResult> {
    let extra: &[(&str, Check)] = if full { FULL } else { &[] };
    QUICK
        .iter()
        .chain(extra)
        .map(|&(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check() {
                Ok(Ok(())) => (true, String::new()),
                Ok(Err(why)) => (false, why),
                Err(e) => (false, e.to_string()),
            };
            SuiteResult {
                name,
                passed,
                detail,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn expect(ok: bool, why: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> polypart::Rational {
    frac(rng.gen_range(-1_000_000..=1_000_000), 1_000_000)
}

fn hilbert_conic() -> Result<std::result::Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut points = PointSet::empty(2);
    while points.len() < 25 {
        let x = random_unit(&mut rng);
        let p = Point::new(vec![x.clone(), &x * &x]);
        if !points.iter().any(|q| *q == p) {
            points.push(p)?;
        }
    }
    for ell in 1..=6u32 {
        let v = hilbert_from_points(&points, ell)?.value;
        let want = 2 * ell as usize + 1;
        if v != want {
            return Ok(Err(format!("degree {ell}: rank {v}, expected {want}")));
        }
    }
    Ok(Ok(()))
}

fn calc(name: &str, args: &[(&str, &str)]) -> Result<Vec<(String, String)>> {
    let values = args
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    evaluate(name, &values)
}

fn entry(out: &[(String, String)], key: &str) -> String {
    out.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
        .unwrap_or_default()
}

fn bound_calculators() -> Result<std::result::Result<(), String>> {
    let cases: &[(&str, &[(&str, &str)], &str)] = &[
        ("chardin_upper", &[("deg", "1"), ("e", "1"), ("ell", "3")], "4"),
        ("chardin_upper", &[("deg", "2"), ("e", "1"), ("ell", "3")], "8"),
        ("chardin_upper", &[("deg", "5"), ("e", "0"), ("ell", "7")], "5"),
        ("chardin_philippon_lower", &[("deg", "1"), ("delta", "1"), ("d", "2"), ("e", "1"), ("ell", "3")], "4"),
        ("chardin_philippon_lower", &[("deg", "2"), ("delta", "2"), ("d", "2"), ("e", "1"), ("ell", "4")], "8"),
        ("chardin_philippon_lower", &[("deg", "3"), ("delta", "3"), ("d", "3"), ("e", "1"), ("ell", "5")], "6"),
        ("prop2_lower", &[("d", "4"), ("delta1", "2"), ("delta2", "3"), ("ell", "1")], "17"),
        ("prop2_lower", &[("d", "4"), ("delta1", "2"), ("delta2", "3"), ("ell", "2")], "55"),
        ("prop2_lower", &[("d", "4"), ("delta1", "2"), ("delta2", "3"), ("ell", "10")], "727"),
        ("coprime_pair_bound", &[("d", "4"), ("deg", "1")], "12"),
        ("coprime_pair_bound", &[("d", "3"), ("deg", "2")], "12"),
        ("coprime_pair_bound", &[("d", "2"), ("deg", "1")], "2"),
        ("betti_bound", &[("deg_g", "5"), ("d", "4")], "625"),
        ("betti_bound", &[("degs", "2,3"), ("deg_g", "7"), ("d", "4")], "294"),
        ("betti_bound", &[("degs", "1"), ("deg_g", "1"), ("d", "2")], "1"),
    ];
    for (name, args, want) in cases {
        let got = entry(&calc(name, args)?, "value");
        if got != *want {
            return Ok(Err(format!("{name} {args:?}: got {got}, expected {want}")));
        }
    }
    let ineq: &[([&str; 5], &str)] = &[
        (["4", "2", "1", "1", "1"], "true"),
        (["4", "2", "5", "2", "2"], "false"),
        (["3", "1", "4", "2", "2"], "true"),
    ];
    for (v, want) in ineq {
        let args = [("d", v[0]), ("e", v[1]), ("deg", v[2]), ("delta1", v[3]), ("delta2", v[4])];
        let got = entry(&calc("degree_inequalities", &args)?, "all_pass");
        if got != *want {
            return Ok(Err(format!("degree_inequalities {v:?}: got {got}, expected {want}")));
        }
    }
    Ok(Ok(()))
}

fn variety_schedule() -> Result<std::result::Result<(), String>> {
    let cases = [
        (["1", "1", "24"], "1", "-4", Some("")),
        (["1", "1", "96"], "10", "2", Some("4,5,8")),
        (["2", "3", "100"], "13/2", "3", None),
    ];
    for (v, eta, t, degrees) in cases {
        let args = [("d", "4"), ("delta1", v[0]), ("delta2", v[1]), ("ell", v[2]), ("c1", "1/16")];
        let out = calc("schedule_variety", &args)?;
        let ok = entry(&out, "eta") == eta
            && entry(&out, "t") == t
            && degrees.map_or(true, |d| entry(&out, "degrees") == d);
        if !ok {
            return Ok(Err(format!("schedule {v:?}: got {out:?}")));
        }
    }
    Ok(Ok(()))
}

fn grid_incidences() -> Result<std::result::Result<(), String>> {
    for q in 2..=10u64 {
        let inst = generate(Family::GridLines2d, &FamilyParams::new().with("q", q), 0)?;
        let count = count_incidences(&inst);
        if count != 2 * q * q {
            return Ok(Err(format!("q = {q}: {count} incidences, expected {}", 2 * q * q)));
        }
    }
    Ok(Ok(()))
}

fn hamsandwich_contract() -> Result<std::result::Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100u64 {
        let n = rng.gen_range(1..=6usize);
        let r = rng.gen_range(1..=3usize.min(n));
        let sets = (0..r)
            .map(|_| {
                let size = 2 * rng.gen_range(0..=4usize) + 1;
                (0..size)
                    .map(|_| (0..n).map(|_| int(rng.gen_range(-20..=20))).collect())
                    .collect()
            })
            .collect();
        let problem = BisectionProblem::new(n, sets).with_seed(i);
        let cut = bisect(&problem)?;
        let recount = Cut::recount(&cut.coefficients, &problem);
        let ok = cut.coefficients.iter().any(|c| *c != int(0))
            && recount.iter().all(|c| c.is_bisected());
        if !ok {
            return Ok(Err(format!("problem {i}: cut does not bisect")));
        }
    }
    Ok(Ok(()))
}

fn plane_partition() -> Result<std::result::Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pts = (0..2000)
        .map(|_| Point::new(vec![random_unit(&mut rng), random_unit(&mut rng)]))
        .collect();
    let result = partition(&PointSet::new(2, pts)?, 8, 0)?;
    Ok(expect(
        result.conservation_ok() && result.degree_ok() && result.balance_ok(),
        || format!("max cell {} against {}", result.max_cell(), result.balance_bound()),
    ))
}

fn variety_partition() -> Result<std::result::Result<(), String>> {
    let plane = coordinate_subspace(4, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let points = plane.sample(1000, &mut rng)?;
    let result = partition_on_variety(&points, &plane, 96, &VarietyOptions::new(4, 0))?;
    Ok(expect(
        result.conservation_ok() && result.degree_ok() && result.balance_ok(),
        || format!("max cell {} against {}", result.max_cell(), result.balance_bound()),
    ))
}

fn level1_quadrics() -> Result<std::result::Result<(), String>> {
    let params = FamilyParams::new().with("m", 200).with("n", 50).with("k", 2);
    let inst = generate(Family::Quadrics4d, &params, 1)?;
    let first = run_level1(&inst, 1)?;
    let again = run_level1(&inst, 1)?;
    let (a, b) = (first.to_report().to_text(), again.to_report().to_text());
    Ok(expect(
        a == b && first.balance_ok() && first.conservation_ok,
        || "report not reproducible or unbalanced".to_string(),
    ))
}
