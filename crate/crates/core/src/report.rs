//! Line-oriented `key = value` reports.
//!
//! Grammar: one entry per line, `key = value`, keys sorted. A key is made of
//! ASCII letters, digits, `_`, `.` and `-`; the value runs to the end of the
//! line with surrounding blanks trimmed. Blank lines and lines starting with
//! `#` are ignored when parsing.

use std::collections::BTreeMap;
use std::fmt::Display;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: BTreeMap<String, String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// Inserts `key = value`; newlines in the value are flattened to spaces.
    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        debug_assert!(valid_key(key), "bad report key {key:?}");
        let v = value.to_string().replace(['\n', '\r'], " ");
        self.entries.insert(key.to_string(), v.trim().to_string());
        self
    }

    /// Comma-separated list value.
    pub fn set_list<T: Display>(&mut self, key: &str, values: impl IntoIterator<Item = T>) -> &mut Self {
        let joined: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
        self.set(key, joined.join(","))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::parse(0, format!("report has no `{key}` entry")))
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|_| Error::parse(0, format!("bad value for `{key}`: {raw}")))
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self.require(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::parse(0, format!("bad list entry for `{key}`: {x}")))
            })
            .collect()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Copies every entry of `other` under `prefix.`.
    pub fn merge_prefixed(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.insert(format!("{prefix}.{k}"), v.clone());
        }
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
            let k = k.trim();
            if !valid_key(k) {
                return Err(Error::parse(i + 1, format!("bad key `{k}`")));
            }
            if entries.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::parse(i + 1, format!("duplicate key `{k}`")));
            }
        }
        Ok(Report { entries })
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}
