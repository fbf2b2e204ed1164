//! Acceptance bands for result rows.
//!
//! A band file holds `key = value` lines (`#` comments allowed):
//!
//! ```text
//! main11.max = 3.0            # ratio <= 3 for every family
//! cor13.laplace.max = 0.9     # family-specific override
//! reverse12.min = 0.25        # reverse12 compares reverse_ratio
//! momclaim.max_over_L = 4     # ratio <= 4 * L
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::output::ResultRow;

/// The band file shipped with the crate.
pub const SHIPPED: &str = include_str!("../../bands/bands.txt");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bands {
    entries: BTreeMap<String, f64>,
}

impl Bands {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("band line {}: expected key = value", lineno + 1))
            })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("band line {}: {e}", lineno + 1)))?;
            entries.insert(key.trim().to_string(), value);
        }
        Ok(Self { entries })
    }

    pub fn shipped() -> Self {
        Self::parse(SHIPPED).expect("shipped band file parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.get(key).copied()
    }

    /// Family-specific value first, then the id-wide value.
    fn lookup(&self, id: &str, family: &str, bound: &str) -> Option<f64> {
        self.get(&format!("{id}.{family}.{bound}"))
            .or_else(|| self.get(&format!("{id}.{bound}")))
    }

    /// Upper bound on the ratio of `id` for `family`, if any.
    pub fn max_for(&self, id: &str, family: &str) -> Option<f64> {
        self.lookup(id, family, "max")
    }

    /// Describes every band the row violates; empty when it passes or has no band.
    pub fn violations(&self, row: &ResultRow) -> Vec<String> {
        let id = row.inequality_id.as_str();
        let family = row.family.as_str();
        let mut out = Vec::new();
        if let Some(reason) = &row.error {
            out.push(format!(
                "{id} ({family}, {}x{}) failed: {reason}",
                row.m, row.n
            ));
            return out;
        }
        let ratio = row.ratio.unwrap_or(f64::NAN);
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
        let cell = format!(
            "{id} ({family}, {}x{}, p={}, q={})",
            row.m,
            row.n,
            opt(row.p),
            opt(row.q)
        );
        if let Some(max) = self.lookup(id, family, "max") {
            if !(ratio <= max) {
                out.push(format!("{cell}: ratio {ratio} > {max}"));
            }
        }
        if let (Some(k), Some(l)) = (self.lookup(id, family, "max_over_L"), row.l) {
            if !(ratio <= k * l) {
                out.push(format!("{cell}: ratio {ratio} > {k} L = {}", k * l));
            }
        }
        if let Some(min) = self.lookup(id, family, "min") {
            let value = if id == "reverse12" {
                row.reverse_ratio.unwrap_or(f64::NAN)
            } else {
                ratio
            };
            if !(value >= min) {
                out.push(format!("{cell}: {value} < {min}"));
            }
        }
        out
    }
}
