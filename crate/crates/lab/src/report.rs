//! Versioned experiment reports and their JSON and CSV encodings.
//!
//! A report has two halves. `data` is a pure function of the config and is
//! byte-stable across runs; `meta` holds wall-clock measurements and
//! anything else that may differ between machines.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, Format};
use crate::LabError;

/// Bumped on any change to the shape of [`Report`].
pub const SCHEMA_VERSION: u32 = 1;

/// One flat record; keys are kept sorted.
pub type Record = Map<String, Value>;

/// Builds a record from a `json!` object literal.
pub fn record(v: Value) -> Record {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// The analytic statement the bound comes from.
    pub anchor: String,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    /// `measured <= bound`.
    pub fn at_most(name: &str, anchor: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), measured, bound, holds: measured <= bound }
    }

    /// `measured >= bound`.
    pub fn at_least(name: &str, anchor: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), anchor: anchor.into(), measured, bound, holds: measured >= bound }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(criterion: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { criterion: criterion.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool_version: String,
    pub elapsed_seconds: f64,
    /// Named wall-clock measurements in seconds.
    pub timing: Map<String, Value>,
    /// Verdicts that depend on wall-clock time.
    pub timing_verdicts: Vec<Verdict>,
}

impl Default for Meta {
    fn default() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            elapsed_seconds: 0.0,
            timing: Map::new(),
            timing_verdicts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportData {
    pub config: ExperimentConfig,
    pub trials: Vec<Record>,
    /// Summary statistics; `null` when there is nothing to summarize.
    pub aggregates: Map<String, Value>,
    /// Secondary tables (sweeps, per-eigenstate summaries, histograms).
    pub tables: Map<String, Value>,
    pub bounds: Vec<BoundCheck>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub meta: Meta,
    pub data: ReportData,
}

impl Report {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            meta: Meta::default(),
            data: ReportData {
                config,
                trials: Vec::new(),
                aggregates: Map::new(),
                tables: Map::new(),
                bounds: Vec::new(),
                verdicts: Vec::new(),
                notes: Vec::new(),
            },
        }
    }

    /// Stores a summary value; non-finite numbers and `None` become `null`.
    pub fn aggregate(&mut self, key: &str, value: Option<f64>) {
        let v = match value {
            Some(x) if x.is_finite() => Value::from(x),
            _ => Value::Null,
        };
        self.data.aggregates.insert(key.into(), v);
    }

    pub fn aggregate_value(&mut self, key: &str, value: Value) {
        self.data.aggregates.insert(key.into(), value);
    }

    pub fn table(&mut self, key: &str, rows: Vec<Record>) {
        self.data.tables.insert(key.into(), Value::Array(rows.into_iter().map(Value::Object).collect()));
    }

    pub fn bound(&mut self, b: BoundCheck) {
        self.data.bounds.push(b);
    }

    pub fn verdict(&mut self, criterion: &str, passed: bool, detail: impl Into<String>) {
        self.data.verdicts.push(Verdict::new(criterion, passed, detail));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.data.notes.push(text.into());
    }

    /// All verdicts, timing included, passed.
    pub fn passed(&self) -> bool {
        self.data.verdicts.iter().chain(&self.meta.timing_verdicts).all(|v| v.passed)
    }

    /// Verdicts of both halves, data first.
    pub fn all_verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.data.verdicts.iter().chain(&self.meta.timing_verdicts)
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, LabError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Canonical encoding of the `data` half; equal across runs of the same
    /// config.
    pub fn data_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string(&self.data)?)
    }

    /// Flat per-trial table. Columns are the sorted union of record keys;
    /// missing and `null` cells are empty, nested values are JSON text. No
    /// columns gives an empty string.
    pub fn to_csv(&self) -> Result<String, LabError> {
        let cols: BTreeSet<&String> = self.data.trials.iter().flat_map(|r| r.keys()).collect();
        if cols.is_empty() {
            return Ok(String::new());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(cols.iter().map(|c| c.as_str()))?;
        for r in &self.data.trials {
            w.write_record(cols.iter().map(|c| cell(r.get(*c))))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn encode(&self, format: Format) -> Result<String, LabError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the encoded report to `path`.
    pub fn emit(&self, format: Format, path: &Path) -> Result<(), LabError> {
        let text = self.encode(format)?;
        fs::write(path, text).map_err(|e| LabError::Unwritable(path.display().to_string(), e))
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(Value::Number(n)) => n.to_string(),
        Some(other) => other.to_string(),
    }
}

/// Mean; `None` for no values.
pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Largest value; `None` for no values.
pub fn max(xs: &[f64]) -> Option<f64> {
    xs.iter().copied().reduce(f64::max)
}

/// Three standard deviations of a frequency over `n` Bernoulli draws with
/// success probability `p`.
pub fn three_sigma(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    3.0 * (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n as f64).sqrt()
}
