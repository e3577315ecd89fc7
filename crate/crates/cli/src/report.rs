use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use codedtn::simulator::SimulationReport;
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: String,
    pub seed: u64,
    pub tool: String,
    pub tool_version: String,
}

/// Simulation report as written to disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub report: SimulationReport,
}

impl ReportFile {
    pub fn new(report: SimulationReport, spec: &Path, seed: u64) -> Self {
        ReportFile {
            schema_version: REPORT_SCHEMA_VERSION,
            provenance: Provenance {
                spec: spec.display().to_string(),
                seed,
                tool: env!("CARGO_PKG_NAME").to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
            },
            report,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn summary(&self) -> String {
        let r = &self.report;
        let mut s = String::new();
        let _ = writeln!(s, "scheme {} on plan {} ({} partitions, field {})", r.scheme, r.plan, r.partitions, r.field);
        let _ = writeln!(
            s,
            "workers {} (formula {}), replication {}, gain {}",
            r.workers_provisioned, r.f_resilient, r.naive_workers, r.gain
        );
        let _ = writeln!(
            s,
            "failures {} x{}: {} set(s){}",
            r.failure_mode,
            r.workers_failed,
            r.failure_sets_tested,
            if r.exhaustive { ", exhaustive" } else { "" }
        );
        match (&r.failure_reason, &r.error) {
            (Some(reason), _) => {
                let _ = writeln!(s, "decode failed: {reason}");
            }
            (None, Some(e)) => {
                let _ = writeln!(
                    s,
                    "decode ok, {}",
                    match e.exact_match {
                        Some(true) => "exact match".to_string(),
                        Some(false) => "MISMATCH".to_string(),
                        None => format!("max relative error {:.3e}", e.max_rel),
                    }
                );
            }
            (None, None) => {}
        }
        let _ = writeln!(s, "verified: {}", r.verified);
        s
    }
}
