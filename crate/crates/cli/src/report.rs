//! Machine-readable results: `report.json`, `tables/*.csv` and
//! `plotdata/*.csv`.
//!
//! The report is a deterministic function of the configs and seeds. The
//! only wall-clock value is the top-level `timestamp_unix` field, which
//! [`strip_timestamp`] removes for comparisons.

use std::fs;
use std::io;
use std::path::Path;

use hypwalk::stats::EstimateCI;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One estimator output, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub estimator: String,
    pub config_hash: String,
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
    pub method: String,
}

impl EstimateRecord {
    pub fn new(estimator: &str, config_hash: &str, e: &EstimateCI) -> EstimateRecord {
        EstimateRecord {
            estimator: estimator.into(),
            config_hash: config_hash.into(),
            value: e.value,
            std_error: e.std_error,
            n: e.sample_count,
            seed: e.seed,
            method: e.method.clone(),
        }
    }
}

/// A checked inequality `lhs ≤ rhs` (or equality within a tolerance,
/// stated as `|difference| ≤ tolerance`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    /// The inequality checked, in words.
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative when violated.
    pub margin: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Assertion {
    /// `lhs ≤ rhs`.
    pub fn at_most(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Assertion {
        let margin = rhs - lhs;
        Assertion {
            name: name.into(),
            inequality: inequality.into(),
            lhs,
            rhs,
            margin,
            passed: margin >= 0.0 && lhs.is_finite() && rhs.is_finite(),
            detail: String::new(),
        }
    }

    /// `lhs < rhs`.
    pub fn below(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Assertion {
        let mut a = Assertion::at_most(name, inequality, lhs, rhs);
        a.passed = lhs < rhs && lhs.is_finite() && rhs.is_finite();
        a
    }

    /// A boolean property, reported as `0 ≤ 0` or `1 ≤ 0`.
    pub fn holds(name: &str, inequality: &str, ok: bool, detail: String) -> Assertion {
        let lhs = if ok { 0.0 } else { 1.0 };
        Assertion { detail, ..Assertion::at_most(name, inequality, lhs, 0.0) }
    }

    /// An assertion that could not be evaluated because an input failed.
    pub fn unavailable(name: &str, inequality: &str, why: &str) -> Assertion {
        Assertion {
            name: name.into(),
            inequality: inequality.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            passed: false,
            detail: format!("not evaluated: {why}"),
        }
    }

    pub fn with_detail(mut self, detail: String) -> Assertion {
        self.detail = detail;
        self
    }
}

/// A rectangular table rendered to `tables/<run>_<name>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Table {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// One row of long-format plot data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub k: f64,
    pub quantity: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// A failure of an estimator or of a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Resource caps, precision loss, insufficient resolution.
    Resource,
    Estimator,
}

impl Failure {
    pub fn from_error(stage: &str, e: &hypwalk::Error) -> Failure {
        use hypwalk::Error as E;
        let kind = match e {
            E::PrecisionLoss(_) | E::InsufficientResolution(_) | E::ResourceLimit(_) => FailureKind::Resource,
            _ => FailureKind::Estimator,
        };
        Failure { stage: stage.into(), kind, message: e.to_string() }
    }
}

/// The outcome of one config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub name: String,
    pub experiment: String,
    pub title: String,
    pub anchor: String,
    pub config_sha256: String,
    pub seed: u64,
    /// The resolved config, defaults included.
    pub config: Value,
    pub estimates: Vec<EstimateRecord>,
    pub assertions: Vec<Assertion>,
    pub failures: Vec<Failure>,
    /// Estimator outputs used only as diagnostics.
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub plotdata: Vec<Table>,
    pub passed: bool,
}

impl Run {
    pub fn finish(&mut self) {
        self.passed = self.assertions.iter().all(|a| a.passed) && self.failures.is_empty() && !self.assertions.is_empty();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub code_version: String,
    pub runs: Vec<Run>,
    pub passed: bool,
    pub exit_code: i32,
    pub timestamp_unix: u64,
}

impl Report {
    pub fn new(runs: Vec<Run>, timestamp_unix: u64) -> Report {
        let passed = runs.iter().all(|r| r.passed);
        let resource = runs.iter().flat_map(|r| &r.failures).any(|f| f.kind == FailureKind::Resource);
        let exit_code = if resource {
            3
        } else if passed {
            0
        } else {
            1
        };
        Report {
            tool: "hypwalk".into(),
            code_version: format!("hypwalk {} / hypwalk-cli {}", hypwalk::VERSION, env!("CARGO_PKG_VERSION")),
            runs,
            passed,
            exit_code,
            timestamp_unix,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json`, `tables/` and `plotdata/` under `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        self.write_tables(dir)
    }

    pub fn write_tables(&self, dir: &Path) -> io::Result<()> {
        for (sub, pick) in [("tables", 0), ("plotdata", 1)] {
            let d = dir.join(sub);
            fs::create_dir_all(&d)?;
            for run in &self.runs {
                let tables = if pick == 0 { &run.tables } else { &run.plotdata };
                for t in tables {
                    write_csv(&d.join(format!("{}_{}.csv", run.name, t.name)), t)?;
                }
            }
        }
        Ok(())
    }

    pub fn read(path: &Path) -> io::Result<Report> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

fn write_csv(path: &Path, t: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row.iter().map(cell))?;
    }
    w.flush()
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Long-format plot table `(k, quantity, value, lo, hi)`.
pub fn plot_table(name: &str, points: &[PlotPoint]) -> Table {
    let mut t = Table::new(name, &["k", "quantity", "value", "lo", "hi"]);
    for p in points {
        t.push(vec![num(p.k), Value::from(p.quantity.clone()), num(p.value), num(p.lo), num(p.hi)]);
    }
    t
}

/// A JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// The report text without its timestamp line.
pub fn strip_timestamp(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"timestamp_unix\"")).collect::<Vec<_>>().join("\n")
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
