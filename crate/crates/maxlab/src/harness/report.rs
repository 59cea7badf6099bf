//! Experiment reports: rows of realized values checked against declared
//! bands, written as CSV (fixed float formatting, byte-stable) and JSON.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Row {
    /// Stable case identifier, unique within a report.
    pub case_id: String,
    pub domain: String,
    /// What was measured (e.g. a ratio or residual).
    pub quantity: String,
    /// Identifier of the invariant the band instantiates.
    pub invariant: String,
    pub value: f64,
    /// Upper band; rows that only record a value use +inf.
    pub bound: f64,
    pub pass: bool,
    /// Semicolon-joined flags (low_res, non_unique_contact, skipped, ...).
    pub flags: String,
}

impl Row {
    pub fn checked(
        case_id: impl Into<String>,
        domain: impl Into<String>,
        quantity: impl Into<String>,
        invariant: impl Into<String>,
        value: f64,
        bound: f64,
    ) -> Row {
        Row {
            case_id: case_id.into(),
            domain: domain.into(),
            quantity: quantity.into(),
            invariant: invariant.into(),
            value,
            bound,
            pass: value.is_finite() && value <= bound,
            flags: String::new(),
        }
    }

    /// A row asserting a lower bound; `bound` stores the required minimum.
    pub fn checked_min(
        case_id: impl Into<String>,
        domain: impl Into<String>,
        quantity: impl Into<String>,
        invariant: impl Into<String>,
        value: f64,
        minimum: f64,
    ) -> Row {
        Row {
            case_id: case_id.into(),
            domain: domain.into(),
            quantity: quantity.into(),
            invariant: invariant.into(),
            value,
            bound: minimum,
            pass: value.is_finite() && value >= minimum,
            flags: String::new(),
        }
    }

    /// A row that records a value without asserting a band.
    pub fn recorded(
        case_id: impl Into<String>,
        domain: impl Into<String>,
        quantity: impl Into<String>,
        invariant: impl Into<String>,
        value: f64,
    ) -> Row {
        Row {
            case_id: case_id.into(),
            domain: domain.into(),
            quantity: quantity.into(),
            invariant: invariant.into(),
            value,
            bound: f64::INFINITY,
            pass: value.is_finite(),
            flags: String::new(),
        }
    }

    pub fn with_flags(mut self, flags: impl Into<String>) -> Row {
        self.flags = flags.into();
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<Row>,
    pub runtime_ms: u128,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        ExperimentReport {
            name: name.into(),
            rows: Vec::new(),
            runtime_ms: 0,
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "case_id,domain,quantity,invariant,value,bound,pass,flags")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{:.12e},{:.12e},{},{}",
                r.case_id, r.domain, r.quantity, r.invariant, r.value, r.bound, r.pass, r.flags
            )?;
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut csv = std::fs::File::create(dir.join(format!("{}.csv", self.name)))?;
        self.write_csv(&mut csv)?;
        let json = std::fs::File::create(dir.join(format!("{}.json", self.name)))?;
        serde_json::to_writer_pretty(json, self)
            .map_err(|e| crate::error::MaxlabError::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let fails = self.failures().len();
        format!(
            "{}: {} rows, {} failed, {} ms",
            self.name,
            self.rows.len(),
            fails,
            self.runtime_ms
        )
    }
}

/// One serialized failing sample, sufficient to re-execute the check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailureRecord {
    pub check: String,
    pub domain: String,
    #[serde(default)]
    pub x: Option<[f64; 2]>,
    #[serde(default)]
    pub y: Option<[f64; 2]>,
    #[serde(default)]
    pub j: Option<u32>,
    #[serde(default)]
    pub k: Option<i32>,
    #[serde(default)]
    pub alpha: Option<f64>,
    pub value: f64,
    pub bound: f64,
}

impl FailureRecord {
    pub fn save(&self, dir: &Path, idx: usize) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("failure_{idx:03}.json"));
        let file = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(file, self)
            .map_err(|e| crate::error::MaxlabError::Parse(e.to_string()))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| crate::error::MaxlabError::Parse(e.to_string()))
    }
}
