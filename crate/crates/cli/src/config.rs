//! Resolved run configuration and its embedding in reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use polypart::report::Report;
use polypart::{Error, Result};

const PREFIX: &str = "config";

/// Everything a command needs, after defaults are filled in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    /// File arguments by flag name.
    pub inputs: BTreeMap<String, String>,
    /// Numeric and textual flags by name.
    pub flags: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            ..RunConfig::default()
        }
    }

    pub fn input(mut self, name: &str, path: Option<impl AsRef<Path>>) -> Self {
        if let Some(p) = path {
            self.inputs
                .insert(name.to_string(), p.as_ref().display().to_string());
        }
        self
    }

    pub fn flag(mut self, name: &str, value: Option<impl ToString>) -> Self {
        if let Some(v) = value {
            self.flags.insert(name.to_string(), v.to_string());
        }
        self
    }

    pub fn output(mut self, out: Option<PathBuf>, verbose: bool) -> Self {
        self.out = out;
        self.verbose = verbose;
        self
    }

    pub fn set_flag(&mut self, name: &str, value: impl ToString) {
        self.flags.insert(name.to_string(), value.to_string());
    }

    pub fn path(&self, name: &str) -> Result<&str> {
        self.inputs
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| Error::parse(0, format!("missing input `--{}`", dashed(name))))
    }

    pub fn has_flag(&self, name: &str) -> bool {
        self.flags.contains_key(name)
    }

    pub fn text(&self, name: &str) -> Result<&str> {
        self.flags
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| Error::parse(0, format!("missing flag `--{}`", dashed(name))))
    }

    pub fn num<T: FromStr>(&self, name: &str) -> Result<T> {
        let raw = self.text(name)?;
        raw.parse().map_err(|_| {
            Error::parse(0, format!("flag `--{}` has bad value `{raw}`", dashed(name)))
        })
    }

    pub fn seed(&self) -> Result<u64> {
        self.num("seed")
    }

    /// Writes the configuration under `config.` into `report`.
    pub fn embed(&self, report: &mut Report) {
        report.set(&format!("{PREFIX}.command"), &self.command);
        for (k, v) in &self.inputs {
            report.set(&format!("{PREFIX}.input.{k}"), v);
        }
        for (k, v) in &self.flags {
            report.set(&format!("{PREFIX}.flag.{k}"), v);
        }
        if let Some(out) = &self.out {
            report.set(&format!("{PREFIX}.out"), out.display());
        }
        report.set(&format!("{PREFIX}.verbose"), self.verbose);
    }

    /// Recovers the configuration embedded in a report.
    pub fn from_report(report: &Report) -> Result<Self> {
        let mut config = RunConfig::new(report.require(&format!("{PREFIX}.command"))?);
        for key in report.keys() {
            let Some(rest) = key.strip_prefix(&format!("{PREFIX}.")) else {
                continue;
            };
            let value = report.get(key).unwrap_or_default().to_string();
            if let Some(name) = rest.strip_prefix("input.") {
                config.inputs.insert(name.to_string(), value);
            } else if let Some(name) = rest.strip_prefix("flag.") {
                config.flags.insert(name.to_string(), value);
            } else if rest == "out" {
                config.out = Some(PathBuf::from(value));
            } else if rest == "verbose" {
                config.verbose = report.parsed(key)?;
            } else if rest != "command" {
                return Err(Error::parse(0, format!("unknown config entry `{key}`")));
            }
        }
        Ok(config)
    }
}

fn dashed(name: &str) -> String {
    name.replace('_', "-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeds_and_recovers() {
        let config = RunConfig::new("partition")
            .input("points", Some("p.txt"))
            .flag("degree", Some(4))
            .flag("seed", Some(7))
            .flag("c1", None::<u32>)
            .output(Some(PathBuf::from("r.txt")), false);
        let mut report = Report::new();
        config.embed(&mut report);
        assert_eq!(report.get("config.flag.seed"), Some("7"));
        let back = RunConfig::from_report(&Report::parse(&report.to_text()).unwrap()).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.num::<u32>("degree").unwrap(), 4);
        assert!(back.num::<u32>("missing").is_err());
    }
}
