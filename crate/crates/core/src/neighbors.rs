//! Exact class-aware nearest-neighbor ranking.
//!
//! `kstar_scan` is the production kernel: blocked distance rows computed in
//! parallel over queries, with no sorting. `kstar_scan_oracle` is the slow
//! reference that materializes and sorts every neighborhood; the two share no
//! distance code.
//!
//! Ranking order is `(distance, neighbor index)` ascending, with the query
//! itself excluded. The k* value of a query is the 1-based rank of the first
//! neighbor whose concept differs from the query's.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ConceptId, EmbeddingSet};

/// Largest instance the reference scan accepts.
pub const ORACLE_LIMIT: usize = 10_000;

/// Name of the tie-break rule, recorded in reports.
pub const TIE_BREAK_RULE: &str = "ascending-index";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    /// `1 - cos(a, b)`.
    Cosine,
}

impl DistanceMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::Cosine => "cosine",
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(DistanceMetric::Euclidean),
            "cosine" => Ok(DistanceMetric::Cosine),
            other => Err(format!("unknown metric {other:?} (expected euclidean or cosine)")),
        }
    }
}

/// One entry of a query's sorted neighborhood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborRank {
    pub query: usize,
    /// 1-based, self excluded.
    pub rank: usize,
    pub neighbor: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// Worker threads; 0 uses the ambient rayon pool.
    pub workers: usize,
    /// Query rows per distance block.
    pub block_rows: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { workers: 0, block_rows: 32 }
    }
}

/// Distances from a contiguous range of query rows to every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBlock {
    pub rows: Range<usize>,
    pub cols: usize,
    values: Vec<f64>,
}

impl DistanceBlock {
    /// Distances from query `q` (an absolute row index inside `rows`).
    pub fn row(&self, q: usize) -> &[f64] {
        let i = q - self.rows.start;
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, q: usize, j: usize) -> f64 {
        self.row(q)[j]
    }
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

/// Per-row norms in 64-bit: squared for euclidean, plain for cosine.
struct Kernel<'a> {
    set: &'a EmbeddingSet,
    metric: DistanceMetric,
    norms: Vec<f64>,
}

impl<'a> Kernel<'a> {
    fn new(set: &'a EmbeddingSet, metric: DistanceMetric) -> Result<Self> {
        let norms: Vec<f64> = (0..set.len())
            .map(|i| {
                let r = set.row(i);
                let sq = dot(r, r);
                match metric {
                    DistanceMetric::Euclidean => sq,
                    DistanceMetric::Cosine => sq.sqrt(),
                }
            })
            .collect();
        if metric == DistanceMetric::Cosine {
            if let Some(index) = norms.iter().position(|&v| v == 0.0) {
                return Err(Error::ZeroNormVector { index });
            }
        }
        Ok(Kernel { set, metric, norms })
    }

    /// Fills `out` (row-major, `rows.len() × n`) with rank keys: squared
    /// distance for euclidean, cosine distance otherwise.
    fn fill_keys(&self, rows: Range<usize>, out: &mut [f64]) {
        let n = self.set.len();
        debug_assert_eq!(out.len(), rows.len() * n);
        // Column-outer so each column row is loaded once per block.
        for j in 0..n {
            let b = self.set.row(j);
            let nb = self.norms[j];
            for (i, q) in rows.clone().enumerate() {
                let na = self.norms[q];
                let ab = dot(self.set.row(q), b);
                out[i * n + j] = match self.metric {
                    DistanceMetric::Euclidean => (na + nb - 2.0 * ab).max(0.0),
                    DistanceMetric::Cosine => 1.0 - ab / (na * nb),
                };
            }
        }
    }
}

/// Distances for a block of query rows against the whole set.
///
/// Euclidean distances use the expanded form `|a|² + |b|² - 2a·b` with
/// 64-bit accumulation, clamped at zero before the square root.
///
/// # Panics
///
/// If `queries` is not within `0..set.len()`.
pub fn pairwise_distance_block(
    queries: Range<usize>,
    set: &EmbeddingSet,
    metric: DistanceMetric,
) -> Result<DistanceBlock> {
    assert!(queries.start <= queries.end && queries.end <= set.len(), "query range out of bounds");
    let kernel = Kernel::new(set, metric)?;
    let n = set.len();
    let mut values = vec![0.0; queries.len() * n];
    kernel.fill_keys(queries.clone(), &mut values);
    if metric == DistanceMetric::Euclidean {
        values.iter_mut().for_each(|v| *v = v.sqrt());
    }
    Ok(DistanceBlock { rows: queries, cols: n, values })
}

/// k* for `query` given its rank keys to every sample.
///
/// Finds the smallest `(key, index)` among cross-concept samples and counts
/// same-concept samples ordered strictly before it.
fn kstar_from_keys(keys: &[f64], labels: &[ConceptId], query: usize) -> u32 {
    let own = labels[query];
    let mut best: Option<(f64, usize)> = None;
    for (j, (&k, &l)) in keys.iter().zip(labels).enumerate() {
        if l != own && best.is_none_or(|(bk, _)| k < bk) {
            best = Some((k, j));
        }
    }
    let (bk, bj) = best.expect("a valid set has at least two concepts");
    let ahead = keys
        .iter()
        .zip(labels)
        .enumerate()
        .filter(|&(j, (&k, &l))| j != query && l == own && (k < bk || (k == bk && j < bj)))
        .count();
    (ahead + 1) as u32
}

/// Raw k* for every sample, using default scan options.
pub fn kstar_scan(set: &EmbeddingSet, metric: DistanceMetric) -> Result<Vec<u32>> {
    kstar_scan_with(set, metric, &ScanOptions::default())
}

/// Raw k* for every sample. Output is identical for any worker count or
/// block size.
pub fn kstar_scan_with(
    set: &EmbeddingSet,
    metric: DistanceMetric,
    opts: &ScanOptions,
) -> Result<Vec<u32>> {
    let kernel = Kernel::new(set, metric)?;
    let n = set.len();
    let block_rows = opts.block_rows.max(1);
    let mut out = vec![0u32; n];

    let run = |out: &mut [u32]| {
        out.par_chunks_mut(block_rows).enumerate().for_each(|(b, chunk)| {
            let start = b * block_rows;
            let rows = start..start + chunk.len();
            let mut keys = vec![0.0; chunk.len() * n];
            kernel.fill_keys(rows.clone(), &mut keys);
            for (i, slot) in chunk.iter_mut().enumerate() {
                *slot = kstar_from_keys(&keys[i * n..(i + 1) * n], set.labels(), start + i);
            }
        });
    };

    if opts.workers == 0 {
        run(&mut out);
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .expect("failed to build worker pool");
        pool.install(|| run(&mut out));
    }
    Ok(out)
}

/// Literal distance between two rows, straight from the definition.
fn reference_distance(a: &[f32], b: &[f32], metric: DistanceMetric) -> f64 {
    match metric {
        DistanceMetric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = f64::from(x) - f64::from(y);
                d * d
            })
            .sum::<f64>()
            .sqrt(),
        DistanceMetric::Cosine => {
            let ab: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
            let aa: f64 = a.iter().map(|&x| f64::from(x) * f64::from(x)).sum();
            let bb: f64 = b.iter().map(|&y| f64::from(y) * f64::from(y)).sum();
            1.0 - ab / (aa.sqrt() * bb.sqrt())
        }
    }
}

/// Every other sample ordered by distance from `query`, ties by index.
pub fn sorted_neighborhood(
    set: &EmbeddingSet,
    metric: DistanceMetric,
    query: usize,
) -> Vec<NeighborRank> {
    let q = set.row(query);
    let mut all: Vec<(f64, usize)> = (0..set.len())
        .filter(|&j| j != query)
        .map(|j| (reference_distance(q, set.row(j), metric), j))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter()
        .enumerate()
        .map(|(r, (distance, neighbor))| NeighborRank { query, rank: r + 1, neighbor, distance })
        .collect()
}

/// Reference k*: sort each full neighborhood, then scan for the first
/// neighbor with a different concept.
pub fn kstar_scan_oracle(set: &EmbeddingSet, metric: DistanceMetric) -> Result<Vec<u32>> {
    if set.len() > ORACLE_LIMIT {
        return Err(Error::InstanceTooLarge { n: set.len(), limit: ORACLE_LIMIT });
    }
    if metric == DistanceMetric::Cosine {
        if let Some(index) = (0..set.len()).find(|&i| set.row(i).iter().all(|&v| v == 0.0)) {
            return Err(Error::ZeroNormVector { index });
        }
    }
    let labels = set.labels();
    Ok((0..set.len())
        .map(|p| {
            sorted_neighborhood(set, metric, p)
                .iter()
                .find(|nr| labels[nr.neighbor] != labels[p])
                .map(|nr| nr.rank as u32)
                .expect("a valid set has at least two concepts")
        })
        .collect())
}
