//! CSV persistence for run records and sweep aggregates.
//!
//! Fixed column order `t,policy,regime,seed,regret,violation,lambda,ee,
//! expected_power`, UTF-8, LF line endings, '.' decimal separator. Sweep
//! aggregates reuse the same columns with the seed column carrying the
//! series label (`mean`, `mean+std`).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::run::RunResult;
use super::sweep::SweepResult;

pub const CSV_HEADER: &str = "t,policy,regime,seed,regret,violation,lambda,ee,expected_power";

fn push_row(out: &mut String, t: u64, policy: &str, regime: &str, seed: &str, rec: [f64; 5]) {
    let _ = writeln!(
        out,
        "{t},{policy},{regime},{seed},{},{},{},{},{}",
        rec[0], rec[1], rec[2], rec[3], rec[4]
    );
}

/// Serializes checkpoint records of one run.
pub fn records_to_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(64 * (result.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let seed = result.seed.to_string();
    for r in &result.records {
        push_row(
            &mut out,
            r.t,
            result.policy.as_str(),
            result.regime.as_str(),
            &seed,
            [r.regret, r.violation, r.lambda, r.ee, r.expected_power],
        );
    }
    out
}

/// Serializes a sweep aggregate: one `mean` and one `mean+std` row per
/// checkpoint.
pub fn sweep_to_csv(sweep: &SweepResult) -> String {
    let mut out = String::with_capacity(128 * (sweep.checkpoints.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, &t) in sweep.checkpoints.iter().enumerate() {
        push_row(
            &mut out,
            t,
            sweep.policy.as_str(),
            sweep.regime.as_str(),
            "mean",
            [
                sweep.regret_mean[i],
                sweep.violation_mean[i],
                sweep.lambda_mean[i],
                sweep.ee_mean[i],
                sweep.expected_power_mean[i],
            ],
        );
        push_row(
            &mut out,
            t,
            sweep.policy.as_str(),
            sweep.regime.as_str(),
            "mean+std",
            [
                sweep.regret_mean[i] + sweep.regret_std[i],
                sweep.violation_mean[i] + sweep.violation_std[i],
                sweep.lambda_mean[i] + sweep.lambda_std[i],
                sweep.ee_mean[i] + sweep.ee_std[i],
                sweep.expected_power_mean[i] + sweep.expected_power_std[i],
            ],
        );
    }
    out
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_records_csv(result: &RunResult, path: &Path) -> Result<()> {
    write_atomic(path, &records_to_csv(result))
}

pub fn write_sweep_csv(sweep: &SweepResult, path: &Path) -> Result<()> {
    write_atomic(path, &sweep_to_csv(sweep))
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: u64,
    pub policy: String,
    pub regime: String,
    pub seed: String,
    pub regret: f64,
    pub violation: f64,
    pub lambda: f64,
    pub ee: f64,
    pub expected_power: f64,
}

/// Parses a CSV body produced by this module (round-trip check and external
/// consumers' reference implementation).
pub fn read_csv(body: &str) -> Result<Vec<CsvRow>> {
    let mut lines = body.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Io(format!("unexpected CSV header: {other:?}")));
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(Error::Io(format!("row {}: expected 9 columns", i + 2)));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Io(format!("row {}: bad number '{s}'", i + 2)))
        };
        rows.push(CsvRow {
            t: cols[0]
                .parse()
                .map_err(|_| Error::Io(format!("row {}: bad round '{}'", i + 2, cols[0])))?,
            policy: cols[1].to_string(),
            regime: cols[2].to_string(),
            seed: cols[3].to_string(),
            regret: num(cols[4])?,
            violation: num(cols[5])?,
            lambda: num(cols[6])?,
            ee: num(cols[7])?,
            expected_power: num(cols[8])?,
        });
    }
    Ok(rows)
}
