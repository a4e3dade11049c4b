use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Statistics are serialized on this lattice so that reruns compare equal.
pub const STAT_RESOLUTION: f64 = 1e-10;

pub fn round_stat(x: f64) -> f64 {
    if x.is_finite() {
        (x / STAT_RESOLUTION).round() * STAT_RESOLUTION
    } else {
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    pub fn holds(self, statistic: f64, threshold: f64) -> bool {
        match self {
            Self::AtMost => statistic <= threshold,
            Self::AtLeast => statistic >= threshold,
            Self::Below => statistic < threshold,
            Self::Above => statistic > threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub statistic: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
    /// Only mandatory checks decide the suite verdict.
    pub mandatory: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub pass: bool,
    pub runtime_seconds: f64,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub verdicts: BTreeMap<String, String>,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl SuiteReport {
    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed_mandatory(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.mandatory && !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.json` under `dir` via a temporary file and rename.
    pub fn write_atomic(&self, dir: &Path) -> Result<std::path::PathBuf> {
        fs::create_dir_all(dir)?;
        let target = dir.join(format!("report_{}.json", self.suite));
        let tmp = dir.join(format!(".report_{}.json.tmp", self.suite));
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(self.to_json()?.as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, &target)?;
        Ok(target)
    }
}
