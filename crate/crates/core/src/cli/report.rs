use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Suite;
use crate::error::{Error, Result};

/// One checked cell. `margin ≥ −tolerance` is the pass condition when
/// `contract` is set; rows without a contract are informational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub cell: String,
    /// Name of the inequality or identity the row checks.
    pub check: String,
    pub value: f64,
    /// `value` in bits for rows measured in nats.
    pub value_bits: Option<f64>,
    pub margin: f64,
    pub tolerance: f64,
    pub contract: bool,
    pub pass: bool,
    pub x: Option<f64>,
    pub series: Option<String>,
    /// Sample index of the worst case, reproducible from the seed.
    pub witness: Option<usize>,
}

impl ReportRow {
    pub fn new(suite: Suite, cell: impl Into<String>, check: &str) -> Self {
        ReportRow {
            suite: suite.name().to_string(),
            cell: cell.into(),
            check: check.to_string(),
            value: f64::NAN,
            value_bits: None,
            margin: 0.0,
            tolerance: 0.0,
            contract: false,
            pass: true,
            x: None,
            series: None,
            witness: None,
        }
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = v;
        self
    }

    pub fn nats(mut self, v: f64) -> Self {
        self.value = v;
        self.value_bits = Some(v / std::f64::consts::LN_2);
        self
    }

    /// Attaches a contract `margin ≥ −tol`.
    pub fn contract(mut self, margin: f64, tol: f64) -> Self {
        self.margin = margin;
        self.tolerance = tol;
        self.contract = true;
        self.pass = margin >= -tol;
        self
    }

    /// Records a margin without a contract.
    pub fn exploratory(mut self, margin: f64) -> Self {
        self.margin = margin;
        self.contract = false;
        self.pass = true;
        self
    }

    pub fn at(mut self, x: f64, series: impl Into<String>) -> Self {
        self.x = Some(x);
        self.series = Some(series.into());
        self
    }

    pub fn witness(mut self, index: usize) -> Self {
        self.witness = Some(index);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    /// 0 when every contract holds, 2 when a violation was found.
    pub fn exit_code(&self) -> u8 {
        if self.pass() {
            0
        } else {
            2
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }

    pub fn summary(&self) -> serde_json::Value {
        let contracts = self.rows.iter().filter(|r| r.contract).count();
        let worst = self
            .rows
            .iter()
            .filter(|r| r.contract)
            .min_by(|a, b| (a.margin + a.tolerance).total_cmp(&(b.margin + b.tolerance)));
        serde_json::json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "rows": self.rows.len(),
            "contract_rows": contracts,
            "pass": self.pass(),
            "worst": worst.map(|r| serde_json::json!({
                "cell": r.cell, "check": r.check, "margin": finite_or_null(r.margin),
            })),
            "violations": self.failures().iter().map(|r| serde_json::json!({
                "cell": r.cell,
                "check": r.check,
                "margin": finite_or_null(r.margin),
                "tolerance": r.tolerance,
                "witness": r.witness,
            })).collect::<Vec<_>>(),
        })
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`.
    pub fn write(&self, prefix: &Path) -> Result<()> {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(prefix.with_extension("csv"), self.to_csv()?)?;
        let json = serde_json::to_string_pretty(&self.summary())?;
        std::fs::write(prefix.with_extension("json"), json + "\n")?;
        Ok(())
    }
}

fn finite_or_null(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Document(e.to_string()))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<ReportRow>, _>>()
        .map_err(|e| Error::Document(format!("report CSV: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub series: String,
}

/// Long-format `(x, y, series)` points. Rows that carry a coordinate are
/// emitted as they are; when no row does, every row is emitted with its
/// position as `x` and its check name as the series.
pub fn emit_plot_data(rows: &[ReportRow]) -> Result<Vec<PlotPoint>> {
    if rows.is_empty() {
        return Err(Error::Document("report has no rows to plot".into()));
    }
    let placed: Vec<PlotPoint> = rows
        .iter()
        .filter_map(|r| {
            Some(PlotPoint { x: r.x?, y: r.value, series: r.series.clone()? })
        })
        .collect();
    if !placed.is_empty() {
        return Ok(placed);
    }
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, r)| PlotPoint { x: i as f64, y: r.value, series: r.check.clone() })
        .collect())
}

pub fn plot_csv(points: &[PlotPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Document(e.to_string()))
}
