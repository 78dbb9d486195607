//! Reports and their CSV/JSON forms.
//!
//! Every CSV begins with two comment lines, `# schema: <name>/<version>` and
//! `# config_sha256: <hash>`, followed by a header row. Numbers are written in
//! the shortest round-trip exponent form, so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Config, Fit, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Gate {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Gate {
        Gate {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Metrics of one sweep point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub eps: f64,
    pub metrics: BTreeMap<String, f64>,
    /// Markers such as `capped`, `horizon` or `blow-up`.
    pub flags: Vec<String>,
}

impl Point {
    pub fn metric(&self, key: &str) -> f64 {
        self.metrics.get(key).copied().unwrap_or(f64::NAN)
    }

    pub fn has(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

/// Rows for the CSV output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV text with the schema and hash comment lines.
    pub fn to_csv(&self, schema: &str, hash: &str) -> Result<String> {
        let mut out = format!("# schema: {schema}/{SCHEMA_VERSION}\n# config_sha256: {hash}\n");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|x| format!("{x:e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub experiment: String,
    pub schema: String,
    pub schema_version: u32,
    pub config_hash: String,
    pub model: String,
    pub config: Config,
    pub epsilons: Vec<f64>,
    pub points: Vec<Point>,
    pub fits: BTreeMap<String, Fit>,
    pub gates: Vec<Gate>,
    pub runtime_s: f64,
    #[serde(skip)]
    pub table: Table,
}

impl SweepReport {
    pub fn new(cfg: &Config, schema: &str) -> SweepReport {
        SweepReport {
            experiment: cfg.experiment.to_string(),
            schema: schema.to_string(),
            schema_version: SCHEMA_VERSION,
            model: cfg.model.clone(),
            config: cfg.clone(),
            config_hash: cfg.hash(),
            epsilons: cfg.eps.clone(),
            points: Vec::new(),
            fits: BTreeMap::new(),
            gates: Vec::new(),
            runtime_s: 0.0,
            table: Table::default(),
        }
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn fit(&self, key: &str) -> Option<&Fit> {
        self.fits.get(key)
    }

    /// Per-point values of one metric, in ε order.
    pub fn series(&self, key: &str) -> Vec<f64> {
        self.points.iter().map(|p| p.metric(key)).collect()
    }

    pub fn csv(&self) -> Result<String> {
        self.table.to_csv(&self.schema, &self.config_hash)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_file(path, &self.csv()?)
    }

    pub fn json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_file(path, &self.json()?)
    }
}

/// One named residual of the normal-form battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NfReport {
    pub experiment: String,
    pub schema: String,
    pub schema_version: u32,
    pub config_hash: String,
    pub config: Config,
    /// Per model: the residual checks.
    pub models: BTreeMap<String, Vec<Check>>,
    /// Per model: fitted remainder decay exponents, against nominal `[-1, -2, -1, -2]`.
    pub decay_exponents: BTreeMap<String, Vec<f64>>,
    pub gates: Vec<Gate>,
    pub runtime_s: f64,
}

impl NfReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    /// Largest residual of a check across models.
    pub fn worst(&self, check: &str) -> f64 {
        self.models
            .values()
            .flatten()
            .filter(|c| c.name == check)
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }

    /// Checks flattened to a table: one row per (model, check).
    pub fn csv(&self) -> Result<String> {
        let mut out = format!(
            "# schema: {}/{SCHEMA_VERSION}\n# config_sha256: {}\n",
            self.schema, self.config_hash
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model", "check", "max_residual", "tolerance", "passed"])?;
        for (m, checks) in &self.models {
            for c in checks {
                w.write_record([
                    m.clone(),
                    c.name.clone(),
                    format!("{:e}", c.max_residual),
                    format!("{:e}", c.tolerance),
                    c.passed.to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    pub fn json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Max over `[lo, hi]` of the five-point central difference of samples spaced `h`.
pub fn max_fd_rate(times: &[f64], vals: &[f64], h: f64, lo: f64, hi: f64) -> f64 {
    rates(vals, h)
        .into_iter()
        .enumerate()
        .filter(|(j, r)| {
            let t = times[*j].abs();
            r.is_finite() && t >= lo - 1e-9 && t <= hi + 1e-9
        })
        .map(|(_, r)| r.abs())
        .fold(0.0, f64::max)
}

/// Five-point central differences; NaN within two samples of either end.
pub fn rates(vals: &[f64], h: f64) -> Vec<f64> {
    let n = vals.len();
    (0..n)
        .map(|j| {
            if j < 2 || j + 2 >= n {
                f64::NAN
            } else {
                (8.0 * (vals[j + 1] - vals[j - 1]) - (vals[j + 2] - vals[j - 2])) / (12.0 * h)
            }
        })
        .collect()
}
