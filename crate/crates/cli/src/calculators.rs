//! Bound calculators reachable by name from the `bounds` command.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use polypart::bounds::{
    betti_bound, binomial, chardin_philippon_lower, chardin_philippon_threshold, chardin_upper,
    coprime_pair_bound, degree_inequalities, prop2_lower, VarietyInvariants,
};
use polypart::incidence::{
    first_level_degree, incidence_bound, level_degrees, st_bound, BoundParams, LevelInputs,
};
use polypart::rational::{format_rational, parse_rational};
use polypart::schedule::{schedule_full_space, schedule_variety};
use polypart::{Error, Rational, Result};

pub const NAMES: &[&str] = &[
    "binomial",
    "chardin_upper",
    "chardin_philippon_lower",
    "chardin_philippon_threshold",
    "prop2_lower",
    "coprime_pair_bound",
    "betti_bound",
    "degree_inequalities",
    "schedule_variety",
    "schedule_full_space",
    "st_bound",
    "incidence_bound",
    "first_level_degree",
    "level_degrees",
];

/// Named arguments of a calculator. Every argument must be consumed.
pub struct CalcArgs<'a> {
    values: &'a BTreeMap<String, String>,
    used: BTreeSet<&'a str>,
}

impl<'a> CalcArgs<'a> {
    pub fn new(values: &'a BTreeMap<String, String>) -> Self {
        CalcArgs {
            values,
            used: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &'a str) -> Result<Option<&'a str>> {
        self.used.insert(key);
        Ok(self.values.get(key).map(String::as_str))
    }

    fn get<T: FromStr>(&mut self, key: &'a str) -> Result<T> {
        self.maybe(key)?
            .ok_or_else(|| Error::parse(0, format!("missing argument `--{key}`")))
    }

    fn maybe<T: FromStr>(&mut self, key: &'a str) -> Result<Option<T>> {
        match self.raw(key)? {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(0, format!("argument `--{key}` has bad value `{v}`"))),
        }
    }

    fn rational(&mut self, key: &'a str, default: Option<Rational>) -> Result<Rational> {
        match self.raw(key)? {
            Some(v) => parse_rational(v)
                .ok_or_else(|| Error::parse(0, format!("argument `--{key}` is not a rational: `{v}`"))),
            None => default.ok_or_else(|| Error::parse(0, format!("missing argument `--{key}`"))),
        }
    }

    fn list(&mut self, key: &'a str) -> Result<Vec<u64>> {
        let raw = self.raw(key)?.unwrap_or("");
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::parse(0, format!("argument `--{key}` has bad entry `{s}`")))
            })
            .collect()
    }

    fn finish(&self) -> Result<()> {
        let extra: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !self.used.contains(k))
            .collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(Error::parse(0, format!("unexpected arguments: {}", extra.join(", "))))
        }
    }
}

/// Evaluates the calculator `name`. A single-valued calculator yields one
/// `value` entry.
pub fn evaluate(name: &str, values: &BTreeMap<String, String>) -> Result<Vec<(String, String)>> {
    let mut a = CalcArgs::new(values);
    let single = |v: String| vec![("value".to_string(), v)];
    let out = match name {
        "binomial" => single(binomial(a.get("n")?, a.get("i")?).to_string()),
        "chardin_upper" => single(chardin_upper(a.get("deg")?, a.get("e")?, a.get("ell")?).to_string()),
        "chardin_philippon_lower" => single(
            chardin_philippon_lower(a.get("deg")?, a.get("delta")?, a.get("d")?, a.get("e")?, a.get("ell")?)?
                .to_string(),
        ),
        "chardin_philippon_threshold" => {
            single(chardin_philippon_threshold(a.get("delta")?, a.get("d")?, a.get("e")?).to_string())
        }
        "prop2_lower" => {
            let (d, delta1, delta2, ell) = (a.get("d")?, a.get("delta1")?, a.get("delta2")?, a.get("ell")?);
            let c = a.rational("c", Some(Rational::from_integer(1.into())))?;
            single(format_rational(&prop2_lower(d, delta1, delta2, ell, &c)?))
        }
        "coprime_pair_bound" => single(coprime_pair_bound(a.get("d")?, a.get("deg")?).to_string()),
        "betti_bound" => {
            let degs = a.list("degs")?;
            single(betti_bound(&degs, a.get("deg_g")?, a.get("d")?)?.to_string())
        }
        "degree_inequalities" => {
            let inv = VarietyInvariants {
                ambient: a.get("d")?,
                dim: a.get("e")?,
                degree: a.get("deg")?,
                delta1: a.get("delta1")?,
                delta2: a.get("delta2")?,
            };
            let report = degree_inequalities(&inv);
            let mut out = vec![("all_pass".to_string(), report.all_pass().to_string())];
            for c in &report.checks {
                let verdict = if c.holds { "pass" } else { "fail" };
                out.push((format!("check.{}", c.name), format!("{verdict}: {}", c.statement)));
            }
            out
        }
        "schedule_variety" => {
            let d: u32 = a.get("d")?;
            let c1 = a.rational("c1", Some(Rational::new(1.into(), (1u64 << d.min(63)).into())))?;
            let s = schedule_variety(d, a.get("delta1")?, a.get("delta2")?, a.get("ell")?, &c1)?;
            vec![
                ("eta".into(), format_rational(&s.eta)),
                ("s0".into(), format!("{:.6}", s.s0())),
                ("s1".into(), format!("{:.6}", s.s1())),
                ("t".into(), s.t.to_string()),
                ("degrees".into(), join(s.entries.iter().map(|e| e.degree))),
                ("regimes".into(), join(s.entries.iter().map(|e| e.regime))),
                ("clamped".into(), join(s.entries.iter().map(|e| e.clamped))),
                ("degree_sum".into(), s.degree_sum().to_string()),
            ]
        }
        "schedule_full_space" => {
            let s = schedule_full_space(a.get("d")?, a.get("ell")?);
            vec![
                ("stages".into(), s.len().to_string()),
                ("degrees".into(), join(s.iter().map(|e| e.degree))),
                ("degree_sum".into(), s.iter().map(|e| u64::from(e.degree)).sum::<u64>().to_string()),
            ]
        }
        "st_bound" => single(format!("{:.6}", st_bound(a.get("m")?, a.get("n")?))),
        "incidence_bound" => {
            let params = BoundParams::new(a.get("d")?, a.get("k")?)?;
            single(format!("{:.6}", incidence_bound(a.get("m")?, a.get("n")?, &params)))
        }
        "first_level_degree" => {
            let params = BoundParams::new(a.maybe("d")?.unwrap_or(4), a.get("k")?)?;
            let (value, clamped) = first_level_degree(a.get("m")?, a.get("n")?, &params);
            vec![
                ("value".into(), format!("{value:.6}")),
                ("branch".into(), branch(clamped).into()),
            ]
        }
        "level_degrees" => {
            let params = BoundParams::new(a.maybe("d")?.unwrap_or(4), a.get("k")?)?;
            let inputs = LevelInputs {
                m: a.get("m")?,
                n: a.get("n")?,
                l_i: a.get("l_i")?,
                d_i: a.get("d_i")?,
                e_ij: a.get("e_ij")?,
                delta_ij: a.get("delta_ij")?,
            };
            let x = level_degrees(&params, &inputs)?;
            vec![
                ("d".into(), format!("{:.6}", x.d)),
                ("d_branch".into(), branch(x.d_clamped).into()),
                ("e".into(), format!("{:.6}", x.e)),
                ("e_branch".into(), branch(x.e_clamped).into()),
                ("f".into(), format!("{:.6}", x.f)),
                ("f_branch".into(), branch(x.f_clamped).into()),
            ]
        }
        other => {
            return Err(Error::parse(
                0,
                format!("unknown calculator `{other}`; known: {}", NAMES.join(", ")),
            ))
        }
    };
    a.finish()?;
    Ok(out)
}

fn branch(clamped: bool) -> &'static str {
    if clamped {
        "clamped"
    } else {
        "unclamped"
    }
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
