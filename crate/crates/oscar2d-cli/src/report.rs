//! CSV serialization of experiment reports.
//!
//! One line per grid cell under a fixed header. Numeric cells use the
//! shortest round-trip float formatting, so identical runs serialize
//! identically; `per` is rendered as a percentage with one decimal, the way
//! recovery tables usually present it. Failed cells keep their row with the
//! metric cells left empty.

use std::fs;
use std::io;
use std::path::Path;

use crate::experiment::{ExperimentReport, ReportRow};

pub const REPORT_HEADER: &str = "algorithm,debias,time_s,mae,mse,per,iterations,converged";

fn format_row(row: &ReportRow) -> String {
    let debias = if row.debias { "yes" } else { "no" };
    let (time_s, mae, mse, per) = match &row.metrics {
        Some(m) => (
            format!("{:.6}", m.time_seconds),
            format!("{}", m.mae),
            format!("{}", m.mse),
            format!("{:.1}%", m.per * 100.0),
        ),
        None => (String::new(), String::new(), String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{},{}",
        row.algorithm, debias, time_s, mae, mse, per, row.iterations, row.converged
    )
}

/// Renders the full CSV, header included.
pub fn format_report(report: &ExperimentReport) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    out
}

/// Writes the CSV to `path`.
pub fn emit_report(report: &ExperimentReport, path: &Path) -> io::Result<()> {
    fs::write(path, format_report(report))
}
