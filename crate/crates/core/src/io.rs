//! File formats: the KSE binary embedding format, CSV embeddings, and
//! JSON / CSV reports.
//!
//! KSE layout, little-endian:
//!
//! ```text
//! magic      4 bytes   "KSE1"
//! n          u64
//! d          u32
//! C          u32       every label is < C
//! points     n·d f32   row-major
//! labels     n u32
//! names_len  u32
//! names      names_len bytes of UTF-8 JSON, {"<label>": "<name>", ...}
//! ```
//!
//! The file is exactly `24 + 4nd + 4n + names_len` bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::report::{Comparison, SpaceReport, REPORT_SCHEMA};
use crate::types::EmbeddingSet;

pub const KSE_MAGIC: [u8; 4] = *b"KSE1";
const KSE_HEADER: u64 = 4 + 8 + 4 + 4;

/// Bytes consumed from a KSE buffer, with truncation checks.
struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> &'a [u8] {
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        s
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take(4).try_into().unwrap())
    }

    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take(8).try_into().unwrap())
    }
}

pub fn read_kse(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_kse(&buf)
}

/// Parses an in-memory KSE image.
pub fn parse_kse(buf: &[u8]) -> Result<EmbeddingSet> {
    let actual = buf.len() as u64;
    let truncated = |expected: u64| Error::Truncated { expected, actual };
    if actual < 4 {
        return Err(truncated(KSE_HEADER));
    }
    if buf[..4] != KSE_MAGIC {
        return Err(Error::BadMagic { found: buf[..4].try_into().unwrap() });
    }
    if actual < KSE_HEADER {
        return Err(truncated(KSE_HEADER));
    }
    let mut cur = Cursor { buf, pos: 4 };
    let n = cur.u64();
    let d = u64::from(cur.u32());
    let concepts = cur.u32();

    let before_names = n
        .checked_mul(d)
        .and_then(|nd| nd.checked_add(n))
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_add(KSE_HEADER + 4))
        .ok_or(truncated(u64::MAX))?;
    if actual < before_names {
        return Err(truncated(before_names));
    }
    let (n, d) = (n as usize, d as usize);

    let points: Vec<f32> = cur
        .take(4 * n * d)
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let mut labels = Vec::with_capacity(n);
    for row in 0..n {
        let label = cur.u32();
        if label >= concepts {
            return Err(Error::LabelOutOfRange { row, label, concepts });
        }
        labels.push(u64::from(label));
    }
    let names_len = u64::from(cur.u32());
    let expected = before_names + names_len;
    if actual < expected {
        return Err(truncated(expected));
    }
    if actual > expected {
        return Err(Error::TrailingBytes { expected, actual });
    }
    let names = parse_names(cur.take(names_len as usize))?;

    EmbeddingSet::new(points, d, &labels, &names)
}

fn parse_names(raw: &[u8]) -> Result<BTreeMap<u64, String>> {
    if raw.is_empty() {
        return Ok(BTreeMap::new());
    }
    let parsed: BTreeMap<String, String> = serde_json::from_slice(raw).map_err(|e| Error::Parse {
        line: e.line() as u64,
        column: e.column(),
        message: format!("names: {e}"),
    })?;
    parsed
        .into_iter()
        .map(|(k, v)| {
            k.parse::<u64>().map(|id| (id, v)).map_err(|_| Error::Parse {
                line: 1,
                column: 0,
                message: format!("names: key {k:?} is not a label"),
            })
        })
        .collect()
}

/// Serializes a set to the KSE layout.
///
/// Labels are written as their original identifiers when those fit in
/// `u32`, otherwise as dense ids. The set's `source` is not stored.
pub fn encode_kse(set: &EmbeddingSet) -> Vec<u8> {
    let ids = set.original_ids();
    let keep_original = ids.iter().all(|&id| id < u64::from(u32::MAX));
    let written: Vec<u32> = if keep_original {
        ids.iter().map(|&id| id as u32).collect()
    } else {
        (0..ids.len() as u32).collect()
    };
    let concepts = written.iter().max().map_or(0, |&m| m + 1);

    let names: BTreeMap<String, &str> = set
        .concept_names()
        .iter()
        .map(|(&c, name)| (written[c as usize].to_string(), name.as_str()))
        .collect();
    let names = serde_json::to_vec(&names).expect("string map serializes");

    let mut out = Vec::with_capacity(24 + 4 * set.points().len() + 4 * set.len() + names.len());
    out.extend_from_slice(&KSE_MAGIC);
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    out.extend_from_slice(&(set.dim() as u32).to_le_bytes());
    out.extend_from_slice(&concepts.to_le_bytes());
    for v in set.points() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &c in set.labels() {
        out.extend_from_slice(&written[c as usize].to_le_bytes());
    }
    out.extend_from_slice(&(names.len() as u32).to_le_bytes());
    out.extend_from_slice(&names);
    out
}

pub fn write_kse(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_kse(set)).map_err(|e| Error::io(path, e))
}

/// Reads `label,f0,f1,...` CSV.
///
/// If every label parses as a non-negative integer the labels are used as
/// concept identifiers directly. Otherwise labels are treated as names,
/// sorted, and numbered from zero.
pub fn read_csv(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file)
}

pub fn parse_csv(input: impl std::io::Read) -> Result<EmbeddingSet> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        Error::Parse { line, column: 0, message: e.to_string() }
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    let width = header.len();
    if width < 2 || header.get(0).map(str::trim) != Some("label") {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "header must be `label,f0,f1,...` with at least one feature".into(),
        });
    }
    let dim = width - 1;

    let mut raw_labels = Vec::new();
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRows { line, expected: width, found: record.len() });
        }
        raw_labels.push(record[0].trim().to_owned());
        for (col, field) in record.iter().enumerate().skip(1) {
            let v: f32 = field.trim().parse().map_err(|e| Error::Parse {
                line,
                column: col + 1,
                message: format!("{field:?}: {e}"),
            })?;
            points.push(v);
        }
    }

    let numeric: Option<Vec<u64>> = raw_labels.iter().map(|l| l.parse::<u64>().ok()).collect();
    match numeric {
        Some(labels) => EmbeddingSet::new(points, dim, &labels, &BTreeMap::new()),
        None => {
            let distinct: BTreeSet<&str> = raw_labels.iter().map(String::as_str).collect();
            let ids: BTreeMap<&str, u64> = distinct.iter().enumerate().map(|(i, &s)| (s, i as u64)).collect();
            let labels: Vec<u64> = raw_labels.iter().map(|l| ids[l.as_str()]).collect();
            let names = ids.iter().map(|(&s, &i)| (i, s.to_owned())).collect();
            EmbeddingSet::new(points, dim, &labels, &names)
        }
    }
}

/// Writes `label,f0,...` CSV using original labels. Floats are written in
/// shortest round-trip form, so reading back is exact.
pub fn write_csv(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |e: csv::Error| Error::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    let mut header = vec!["label".to_owned()];
    header.extend((0..set.dim()).map(|j| format!("f{j}")));
    w.write_record(&header).map_err(io_err)?;
    for i in 0..set.len() {
        let mut rec = vec![set.original_id(set.labels()[i]).to_string()];
        rec.extend(set.row(i).iter().map(f32::to_string));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvSummary,
}

/// Pretty JSON with a trailing newline. Field order follows [`SpaceReport`].
pub fn report_json(report: &SpaceReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|g| g.to_string()).unwrap_or_default()
}

/// One row per concept: `id,name,n,gamma,pattern,degenerate`.
pub fn report_csv_summary(report: &SpaceReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "name", "n", "gamma", "pattern", "degenerate"]).unwrap();
    for s in &report.concept_summaries {
        w.write_record([
            s.original_id.to_string(),
            s.name.clone().unwrap_or_default(),
            s.sample_count.to_string(),
            opt_f64(s.gamma),
            s.pattern.to_string(),
            s.degenerate.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn write_report(report: &SpaceReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let body = match format {
        ReportFormat::Json => report_json(report),
        ReportFormat::CsvSummary => report_csv_summary(report),
    };
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Reads a JSON report, rejecting any schema other than `kstar-report/1`.
pub fn read_report(path: impl AsRef<Path>) -> Result<SpaceReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let json_err = |e: serde_json::Error| Error::Parse {
        line: e.line() as u64,
        column: e.column(),
        message: format!("{}: {e}", path.display()),
    };
    let value: Value = serde_json::from_str(&text).map_err(json_err)?;
    let schema = value.get("schema").and_then(Value::as_str).unwrap_or("");
    if schema != REPORT_SCHEMA {
        return Err(Error::SchemaMismatch {
            path: path.to_owned(),
            found: schema.to_owned(),
            expected: REPORT_SCHEMA.to_owned(),
        });
    }
    serde_json::from_value(value).map_err(json_err)
}

/// Plot-ready comparison: one row per report with the shared metadata
/// values followed by the two coefficients and the pattern counts.
pub fn comparison_csv(cmp: &Comparison) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["source".to_owned(), "metric".to_owned()];
    header.extend(cmp.shared_keys.iter().cloned());
    header.extend(
        ["gamma_true", "gamma_approx", "fractured", "overlapped", "clustered", "degenerate"].map(String::from),
    );
    w.write_record(&header).unwrap();
    for row in &cmp.rows {
        let mut rec = vec![row.label.clone(), row.metric.to_string()];
        rec.extend(row.metadata.iter().map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }));
        let c = row.pattern_counts;
        rec.extend([
            opt_f64(row.gamma_true),
            opt_f64(row.gamma_approx),
            c.fractured.to_string(),
            c.overlapped.to_string(),
            c.clustered.to_string(),
            c.degenerate.to_string(),
        ]);
        w.write_record(&rec).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn write_text(path: impl AsRef<Path>, body: &str) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}
