//! Plain-text tables for the terminal.

use std::fmt::Write;

use kstar_core::check::InstanceOutcome;
use kstar_core::report::Comparison;
use kstar_core::SpaceReport;
use serde_json::Value;

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_owned(), |g| format!("{g:.4}"))
}

pub fn summary_table(report: &SpaceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>8}  {:<20}  {:>6}  {:>10}  {:>8}  pattern", "concept", "name", "n", "gamma", "mean k*");
    for c in &report.concept_summaries {
        let _ = writeln!(
            s,
            "{:>8}  {:<20}  {:>6}  {:>10}  {:>8.4}  {}",
            c.original_id,
            c.name.as_deref().unwrap_or("-"),
            c.sample_count,
            fmt_opt(c.gamma),
            c.mean_kstar,
            c.label()
        );
    }
    let p = report.pattern_counts;
    let _ = writeln!(s);
    let _ = writeln!(s, "metric             {}", report.metric);
    let _ = writeln!(s, "samples            {} x {} dims, {} concepts", report.n, report.d, report.concept_count);
    let _ = writeln!(s, "true skewness      {}", fmt_opt(report.gamma_true));
    let _ = writeln!(
        s,
        "approx skewness    {} ({} degenerate excluded)",
        fmt_opt(report.gamma_approx),
        report.gamma_approx_excluded
    );
    let _ = writeln!(
        s,
        "patterns           fractured {}, overlapped {}, clustered {}, degenerate {}",
        p.fractured, p.overlapped, p.clustered, p.degenerate
    );
    s
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn comparison_table(cmp: &Comparison) -> String {
    let mut header: Vec<String> = ["source", "metric", "gamma_true", "gamma_approx", "F", "O", "C", "D"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(cmp.shared_keys.iter().cloned());

    let rows: Vec<Vec<String>> = cmp
        .rows
        .iter()
        .map(|r| {
            let c = r.pattern_counts;
            let mut row = vec![
                r.label.clone(),
                r.metric.to_string(),
                fmt_opt(r.gamma_true),
                fmt_opt(r.gamma_approx),
                c.fractured.to_string(),
                c.overlapped.to_string(),
                c.clustered.to_string(),
                c.degenerate.to_string(),
            ];
            row.extend(r.metadata.iter().map(cell));
            row
        })
        .collect();

    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let joined: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        joined.join("  ").trim_end().to_owned()
    };
    let mut s = String::new();
    let _ = writeln!(s, "{}", line(&header));
    for r in &rows {
        let _ = writeln!(s, "{}", line(r));
    }
    s
}

pub struct OracleReport {
    pub text: String,
    pub mismatches: usize,
}

pub fn oracle_report(outcomes: &[InstanceOutcome]) -> OracleReport {
    let mut text = String::new();
    let mut mismatches = 0;
    for o in outcomes {
        let i = o.instance;
        mismatches += o.mismatches;
        if let Some(m) = o.first {
            let _ = writeln!(
                text,
                "MISMATCH seed={} n={} d={} classes={} metric={}: {} samples differ; first at sample {} (oracle {}, kernel {})",
                i.seed, i.n, i.dim, i.classes, i.metric, o.mismatches, m.sample, m.expected, m.actual
            );
        }
    }
    if mismatches == 0 {
        let _ = writeln!(text, "PASS, 0 mismatches over {} instances", outcomes.len());
    } else {
        let _ = writeln!(text, "FAIL, {mismatches} mismatches over {} instances", outcomes.len());
    }
    OracleReport { text, mismatches }
}
