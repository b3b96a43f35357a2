//! Report serialization: one flat row schema, two encodings.
//!
//! CSV is the stable machine-readable surface — the header below is frozen,
//! and a report with zero rows is exactly that header. JSON carries the
//! same row data (same field names, full float precision) plus the error
//! list, for consumers that want structure instead of columns.

use std::fmt::Write as _;

use crate::bench::{BenchRow, Report};

/// Frozen column order. Changing this breaks downstream parsers; don't.
pub const CSV_HEADER: &str = "kernel,F,n,op,result_ok,divergent_branches,barriers,\
global_transactions,local_accesses,bank_conflict_extra,shfl_ops,wavefront_issues,\
sim_cycles,speedup";

/// Output encodings for a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn csv_row(out: &mut String, r: &BenchRow) {
    // Labels are kernel names and op names from a fixed vocabulary — no
    // commas or quotes — so plain joining is correct, not just convenient.
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.kernel,
        r.factor,
        r.n,
        r.op,
        r.result_ok,
        r.divergent_branches,
        r.barriers,
        r.global_transactions,
        r.local_accesses,
        r.bank_conflict_extra,
        r.shfl_ops,
        r.wavefront_issues,
        r.sim_cycles,
        r.speedup,
    );
}

/// Render the rows as CSV. Errors are not part of the CSV surface; callers
/// report them on stderr and via the exit status.
pub fn to_csv(report: &Report) -> String {
    let mut out = String::with_capacity(64 + 96 * report.rows.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        csv_row(&mut out, row);
    }
    out
}

/// Render the whole report (rows and errors) as pretty-printed JSON.
pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    s.push('\n');
    s
}

pub fn render(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(report),
        ReportFormat::Json => to_json(report),
    }
}

// ---------------------------------------------------------------------------
