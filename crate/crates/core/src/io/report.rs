//! JSON and plain-text reports, and curve CSVs.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::format_decimal;
use crate::eval::{MeanStd, MetricsReport, PrPoint, SweepRow};

pub const REPORT_SCHEMA: u32 = 1;

/// Wraps `body` as `{"schema": 1, "kind": kind, ...body}`.
pub fn json_report<T: Serialize>(kind: &str, body: &T) -> Result<Value, serde_json::Error> {
    let mut out = json!({ "schema": REPORT_SCHEMA, "kind": kind });
    match serde_json::to_value(body)? {
        Value::Object(fields) => {
            if let Value::Object(o) = &mut out {
                o.extend(fields);
            }
        }
        other => out["data"] = other,
    }
    Ok(out)
}

fn mean_std(m: &Option<MeanStd>) -> String {
    match m {
        Some(m) => format!("{:.3} ± {:.3} (n={})", m.mean, m.std, m.n),
        None => "n/a".into(),
    }
}

/// Aligned `name  value` lines.
pub fn metrics_text(report: &MetricsReport) -> String {
    let c = &report.counts;
    let rows = [
        ("precision", format!("{:.4}", report.precision)),
        ("recall", format!("{:.4}", report.recall)),
        ("f1", format!("{:.4}", report.f1)),
        ("accuracy", format!("{:.4}", report.accuracy)),
        ("ap", report.ap.map_or("n/a".into(), |v| format!("{v:.4}"))),
        ("mae_l [px]", mean_std(&report.mae_l)),
        ("mae_theta [deg]", mean_std(&report.mae_theta)),
        (
            "tp/fp/tn/fn",
            format!("{}/{}/{}/{}", c.tp, c.fp, c.tn, c.fn_),
        ),
    ];
    let mut out = String::new();
    for (name, value) in rows {
        let _ = writeln!(out, "{name:<16} {value}");
    }
    if !report.flags.is_empty() {
        let _ = writeln!(out, "{:<16} {}", "flags", report.flags.join(", "));
    }
    out
}

/// `delta,precision,recall,f1` rows.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("delta,precision,recall,f1\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_decimal(r.delta, 4),
            format_decimal(r.report.precision, 6),
            format_decimal(r.report.recall, 6),
            format_decimal(r.report.f1, 6)
        );
    }
    out
}

pub fn sweep_text(rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{:>6} {:>9} {:>9} {:>9}\n",
        "delta", "precision", "recall", "f1"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6.2} {:>9.4} {:>9.4} {:>9.4}",
            r.delta, r.report.precision, r.report.recall, r.report.f1
        );
    }
    out
}

/// `confidence,precision,recall` rows.
pub fn pr_curve_csv(curve: &[PrPoint]) -> String {
    let mut out = String::from("confidence,precision,recall\n");
    for p in curve {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_decimal(p.confidence, 6),
            format_decimal(p.precision, 6),
            format_decimal(p.recall, 6)
        );
    }
    out
}
