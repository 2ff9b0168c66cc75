//! Machine-readable campaign reports: canonical JSON on disk plus a
//! human-readable summary table on stdout.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::oracle::{OracleVerdict, ALL_ORACLES};
use crate::word::Address;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub campaign: CampaignEcho,
    pub contracts: Vec<ContractReport>,
    pub totals: BTreeMap<String, usize>,
}

#[derive(Debug, Serialize)]
pub struct CampaignEcho {
    pub seed: u64,
    pub k: usize,
    pub max_calls_per_contract: usize,
    pub gas_budget: u64,
    pub reentry_limit: u32,
    pub oracles: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ContractReport {
    pub name: String,
    pub address: Address,
    pub calls_executed: usize,
    pub coverage: Vec<String>,
    pub verdicts: Vec<OracleVerdict>,
}

impl Report {
    pub fn total_verdicts(&self) -> usize {
        self.totals.values().sum()
    }

    /// Canonical JSON: struct field order is fixed and every map is a
    /// BTreeMap, so identical campaigns serialize to identical bytes.
    pub fn to_canonical_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report is always serializable");
        out.push('\n');
        out
    }
}

/// Writes the report atomically: a temp file in the target directory is
/// renamed over the destination.
pub fn write_report(report: &Report, path: &Path) -> io::Result<()> {
    let json = report.to_canonical_json();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(dir) => dir.join(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
        )),
        None => std::path::PathBuf::from(format!(".{}.tmp", path.display())),
    };
    fs::write(&tmp, json)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Summary table: one row per vulnerability type with the number of flagged
/// contracts and the percentage over all contracts fuzzed.
pub fn render_summary(report: &Report) -> String {
    let total_contracts = report.contracts.len();
    let mut out = String::new();
    let _ = writeln!(out, "{:<24} {:>14} {:>12}", "Vulnerability Type", "Contracts", "Percentage");
    for kind in ALL_ORACLES {
        let count = report.totals.get(kind.name()).copied().unwrap_or(0);
        let percentage = if total_contracts == 0 {
            0.0
        } else {
            100.0 * count as f64 / total_contracts as f64
        };
        let _ = writeln!(out, "{:<24} {:>14} {:>11.2}%", kind.name(), count, percentage);
    }
    let _ = writeln!(out, "{:<24} {:>14}", "total", report.total_verdicts());
    let _ = writeln!(
        out,
        "{} contracts fuzzed, {} calls executed",
        total_contracts,
        report.contracts.iter().map(|c| c.calls_executed).sum::<usize>()
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_report() -> Report {
        Report {
            schema: 1,
            campaign: CampaignEcho {
                seed: 42,
                k: 10,
                max_calls_per_contract: 200,
                gas_budget: 1_000_000,
                reentry_limit: 2,
                oracles: ALL_ORACLES.iter().map(|k| k.name().to_string()).collect(),
            },
            contracts: Vec::new(),
            totals: ALL_ORACLES.iter().map(|k| (k.name().to_string(), 0)).collect(),
        }
    }

    #[test]
    fn empty_report_is_valid_json_with_zeroed_totals() {
        let report = empty_report();
        let json = report.to_canonical_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["schema"], 1);
        assert_eq!(parsed["totals"]["reentrancy"], 0);
        assert_eq!(report.total_verdicts(), 0);
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let report = empty_report();
        write_report(&report, &path).unwrap();
        let first = fs::read(&path).unwrap();
        write_report(&report, &path).unwrap();
        let second = fs::read(&path).unwrap();
        assert_eq!(first, second);
        assert!(!dir.path().join(".report.json.tmp").exists());
    }

    #[test]
    fn summary_has_a_row_per_oracle() {
        let summary = render_summary(&empty_report());
        for kind in ALL_ORACLES {
            assert!(summary.contains(kind.name()), "missing {}", kind.name());
        }
    }
}
