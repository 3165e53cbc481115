//! Result records and the three artifacts: `results.csv`, `summary.json`,
//! `provenance.json`.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::RunError;

pub const CSV_HEADER: [&str; 7] = ["case", "quantity", "value", "lower", "upper", "holds", "check"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    None,
    Upper(f64),
    Lower(f64),
    Between(f64, f64),
}

/// One measured quantity. `check` names the asserted inequality; it is empty
/// for plain measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub case: String,
    pub quantity: String,
    pub value: f64,
    pub bound: Bound,
    pub check: &'static str,
}

impl Record {
    pub fn info(case: impl Into<String>, quantity: impl Into<String>, value: f64) -> Self {
        Self { case: case.into(), quantity: quantity.into(), value, bound: Bound::None, check: "" }
    }

    pub fn upper(case: impl Into<String>, quantity: impl Into<String>, value: f64, upper: f64, check: &'static str) -> Self {
        Self { case: case.into(), quantity: quantity.into(), value, bound: Bound::Upper(upper), check }
    }

    pub fn lower(case: impl Into<String>, quantity: impl Into<String>, value: f64, lower: f64, check: &'static str) -> Self {
        Self { case: case.into(), quantity: quantity.into(), value, bound: Bound::Lower(lower), check }
    }

    pub fn between(case: impl Into<String>, quantity: impl Into<String>, value: f64, lo: f64, hi: f64, check: &'static str) -> Self {
        Self { case: case.into(), quantity: quantity.into(), value, bound: Bound::Between(lo, hi), check }
    }

    /// `None` for measurements; NaN never satisfies a bound.
    pub fn holds(&self) -> Option<bool> {
        let v = self.value;
        match self.bound {
            Bound::None => None,
            Bound::Upper(u) => Some(v <= u),
            Bound::Lower(l) => Some(v >= l),
            Bound::Between(l, u) => Some(v >= l && v <= u),
        }
    }

    /// The single limit of a one-sided check, the upper one otherwise.
    pub fn bound_value(&self) -> f64 {
        match self.bound {
            Bound::None => f64::NAN,
            Bound::Upper(u) | Bound::Between(_, u) => u,
            Bound::Lower(l) => l,
        }
    }

    fn limits(&self) -> (Option<f64>, Option<f64>) {
        match self.bound {
            Bound::None => (None, None),
            Bound::Upper(u) => (None, Some(u)),
            Bound::Lower(l) => (Some(l), None),
            Bound::Between(l, u) => (Some(l), Some(u)),
        }
    }
}

/// What an experiment hands back.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    /// Experiment-specific summary fields, kept in insertion order.
    pub summary: Map<String, Value>,
    /// Fingerprints of the momentum grids used.
    pub grids: Vec<String>,
}

impl Outcome {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = Record>) {
        self.records.extend(rs);
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn grid(&mut self, fingerprint: String) {
        if !self.grids.contains(&fingerprint) {
            self.grids.push(fingerprint);
        }
    }

    pub fn violations(&self) -> Vec<&Record> {
        self.records.iter().filter(|r| r.holds() == Some(false)).collect()
    }

    pub fn checks(&self) -> usize {
        self.records.iter().filter(|r| r.holds().is_some()).count()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn csv_bytes(records: &[Record]) -> Result<Vec<u8>, RunError> {
    if records.is_empty() {
        return Err(RunError::Precondition("empty result set".into()));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        let (lo, hi) = r.limits();
        let holds = match r.holds() {
            None => "",
            Some(true) => "true",
            Some(false) => "false",
        };
        w.write_record([
            r.case.as_str(),
            r.quantity.as_str(),
            &fmt_float(r.value),
            &lo.map(fmt_float).unwrap_or_default(),
            &hi.map(fmt_float).unwrap_or_default(),
            holds,
            r.check,
        ])?;
    }
    w.into_inner().map_err(|e| RunError::Io(e.into_error()))
}

pub fn summary_json(experiment: &str, outcome: &Outcome) -> Value {
    let violations = outcome.violations();
    let mut m = Map::new();
    m.insert("experiment".into(), experiment.into());
    m.insert("status".into(), if violations.is_empty() { "pass" } else { "fail" }.into());
    m.insert("records".into(), outcome.records.len().into());
    m.insert("checks".into(), outcome.checks().into());
    m.insert("violations".into(), violations.len().into());
    let named: Vec<Value> = violations.iter().take(20).map(|r| format!("{}/{} [{}]", r.case, r.quantity, r.check).into()).collect();
    m.insert("violated".into(), Value::Array(named));
    for (k, v) in &outcome.summary {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

/// Hex SHA-256 of the grid fingerprints, one per line.
pub fn grid_hash(grids: &[String]) -> String {
    let mut h = Sha256::new();
    for g in grids {
        h.update(g.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub seed: Option<u64>,
    pub threads: usize,
    pub config: std::collections::BTreeMap<String, String>,
}

pub fn provenance_json(info: &RunInfo<'_>, outcome: &Outcome) -> Value {
    json!({
        "tool": "fockscope",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": fockscope_core::VERSION,
        "experiment": info.experiment,
        "seed": info.seed,
        "threads": info.threads,
        "config": info.config,
        "grids": outcome.grids,
        "grid_hash": grid_hash(&outcome.grids),
    })
}

/// Writes the three artifacts into `dir`, creating it if needed.
pub fn emit(dir: &Path, info: &RunInfo<'_>, outcome: &Outcome) -> Result<(), RunError> {
    let csv = csv_bytes(&outcome.records)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), csv)?;
    let mut summary = serde_json::to_string_pretty(&summary_json(info.experiment, outcome))?;
    summary.push('\n');
    fs::write(dir.join("summary.json"), summary)?;
    let mut prov = serde_json::to_string_pretty(&provenance_json(info, outcome))?;
    prov.push('\n');
    fs::write(dir.join("provenance.json"), prov)?;
    Ok(())
}
