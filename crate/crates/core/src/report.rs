//! End-to-end analysis of an embedding set and comparison of saved reports.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::distribution::{build_distributions, pool_distributions};
use crate::error::Result;
use crate::neighbors::{kstar_scan_with, DistanceMetric, ScanOptions, TIE_BREAK_RULE};
use crate::statistics::{
    classify_pattern, gamma_approx, gamma_true, skewness, Pattern, PatternCounts, Skewness,
    DEFAULT_HISTOGRAM_BINS,
};
use crate::types::{ConceptId, EmbeddingSet};

pub const REPORT_SCHEMA: &str = "kstar-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-sample k* values for one set.
#[derive(Debug, Clone, PartialEq)]
pub struct KStarResult {
    pub per_sample_kstar: Vec<u32>,
    pub per_sample_normalized: Vec<f64>,
    pub metric: DistanceMetric,
}

impl KStarResult {
    pub fn compute(set: &EmbeddingSet, metric: DistanceMetric, scan: &ScanOptions) -> Result<Self> {
        let raw = kstar_scan_with(set, metric, scan)?;
        let sizes = set.concept_sizes();
        let per_sample_normalized = raw
            .iter()
            .zip(set.labels())
            .map(|(&k, &c)| f64::from(k) / sizes[c as usize] as f64)
            .collect();
        Ok(KStarResult { per_sample_kstar: raw, per_sample_normalized, metric })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptSummary {
    pub concept_id: ConceptId,
    pub original_id: u64,
    pub name: Option<String>,
    pub sample_count: usize,
    /// `None` when the distribution is degenerate.
    pub gamma: Option<f64>,
    pub mean_kstar: f64,
    pub pattern: Pattern,
    pub degenerate: bool,
    pub histogram: Vec<u64>,
}

impl ConceptSummary {
    /// Pattern name with degenerate concepts marked, e.g. `degenerate-clustered`.
    pub fn label(&self) -> String {
        if self.degenerate {
            format!("degenerate-{}", self.pattern)
        } else {
            self.pattern.to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceReport {
    pub schema: String,
    pub tool_version: String,
    pub source: Option<String>,
    pub metric: DistanceMetric,
    pub tie_break: String,
    pub n: usize,
    pub d: usize,
    pub concept_count: usize,
    /// Skewness of the pooled distribution.
    pub gamma_true: Option<f64>,
    /// Mean of the defined per-concept skewness values.
    pub gamma_approx: Option<f64>,
    pub gamma_approx_excluded: usize,
    pub pattern_counts: PatternCounts,
    pub histogram_bins: usize,
    pub concept_summaries: Vec<ConceptSummary>,
    pub metadata: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_kstar: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub metric: DistanceMetric,
    pub histogram_bins: usize,
    pub include_raw_kstar: bool,
    pub scan: ScanOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            metric: DistanceMetric::default(),
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
            include_raw_kstar: false,
            scan: ScanOptions::default(),
        }
    }
}

/// Runs the full pipeline: k* scan, per-concept distributions, skewness,
/// pattern classification, and the two whole-space coefficients.
pub fn analyze(set: &EmbeddingSet, opts: &AnalysisOptions) -> Result<SpaceReport> {
    let raw = kstar_scan_with(set, opts.metric, &opts.scan)?;
    analyze_kstar(set, &raw, opts)
}

/// As [`analyze`], from precomputed raw k* values.
pub fn analyze_kstar(set: &EmbeddingSet, raw: &[u32], opts: &AnalysisOptions) -> Result<SpaceReport> {
    let dists = build_distributions(set, raw)?;

    let mut gammas: Vec<Skewness> = Vec::with_capacity(dists.len());
    let mut summaries = Vec::with_capacity(dists.len());
    let mut counts = PatternCounts::default();
    for dist in &dists {
        let gamma = skewness(&dist.normalized)?;
        let mean = dist.mean();
        let class = classify_pattern(&gamma, mean);
        counts.add(&class);
        gammas.push(gamma);
        summaries.push(ConceptSummary {
            concept_id: dist.concept,
            original_id: set.original_id(dist.concept),
            name: set.concept_name(dist.concept).map(str::to_owned),
            sample_count: dist.size,
            gamma: gamma.value,
            mean_kstar: mean,
            pattern: class.pattern,
            degenerate: class.degenerate,
            histogram: dist.histogram(opts.histogram_bins),
        });
    }

    let pooled = pool_distributions(&dists)?;
    let approx = gamma_approx(&gammas).ok();

    Ok(SpaceReport {
        schema: REPORT_SCHEMA.to_owned(),
        tool_version: TOOL_VERSION.to_owned(),
        source: set.source().map(str::to_owned),
        metric: opts.metric,
        tie_break: TIE_BREAK_RULE.to_owned(),
        n: set.len(),
        d: set.dim(),
        concept_count: set.concept_count(),
        gamma_true: gamma_true(&pooled)?.value,
        gamma_approx: approx.map(|a| a.value),
        gamma_approx_excluded: approx.map_or(gammas.len(), |a| a.excluded),
        pattern_counts: counts,
        histogram_bins: opts.histogram_bins,
        concept_summaries: summaries,
        metadata: BTreeMap::new(),
        raw_kstar: opts.include_raw_kstar.then(|| raw.to_vec()),
    })
}

/// Parses a metadata value: finite numbers stay numeric, anything else is
/// kept as a string.
pub fn metadata_value(raw: &str) -> Value {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => serde_json::Number::from_f64(v).map_or_else(|| Value::String(raw.to_owned()), Value::Number),
        _ => Value::String(raw.to_owned()),
    }
}

/// One row of a cross-report comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub metric: DistanceMetric,
    pub gamma_true: Option<f64>,
    pub gamma_approx: Option<f64>,
    pub pattern_counts: PatternCounts,
    /// Values for each of the comparison's shared keys, in order.
    pub metadata: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Metadata keys present in every report.
    pub shared_keys: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// Aligns reports into rows. `labels` name each report (usually its
/// `source`, or the file name when that is absent).
pub fn compare_reports(reports: &[(String, SpaceReport)]) -> Comparison {
    let mut shared: Option<BTreeSet<&String>> = None;
    for (_, r) in reports {
        let keys: BTreeSet<&String> = r.metadata.keys().collect();
        shared = Some(match shared {
            None => keys,
            Some(s) => s.intersection(&keys).copied().collect(),
        });
    }
    let shared_keys: Vec<String> = shared.unwrap_or_default().into_iter().cloned().collect();
    let rows = reports
        .iter()
        .map(|(label, r)| ComparisonRow {
            label: label.clone(),
            metric: r.metric,
            gamma_true: r.gamma_true,
            gamma_approx: r.gamma_approx,
            pattern_counts: r.pattern_counts,
            metadata: shared_keys.iter().map(|k| r.metadata[k].clone()).collect(),
        })
        .collect();
    Comparison { shared_keys, rows }
}
