//! k* distribution analysis of labeled latent spaces.
//!
//! For every sample, k* is the rank of its nearest neighbor from a different
//! concept. Normalized per concept and summarized by skewness, the k*
//! distribution separates concepts that form one cluster, overlap with
//! others, or are fractured into several sub-clusters.
//!
//! ```
//! use std::collections::BTreeMap;
//! use kstar_core::{analyze, AnalysisOptions, EmbeddingSet, Pattern};
//!
//! let set = EmbeddingSet::new(
//!     vec![0.0, 1.0, 2.0, 10.0, 11.0, 12.0],
//!     1,
//!     &[0, 0, 0, 1, 1, 1],
//!     &BTreeMap::new(),
//! )?;
//! let report = analyze(&set, &AnalysisOptions::default())?;
//! assert!(report.concept_summaries.iter().all(|s| s.pattern == Pattern::Clustered));
//! # Ok::<(), kstar_core::Error>(())
//! ```

pub mod check;
pub mod distribution;
pub mod error;
pub mod io;
pub mod neighbors;
pub mod report;
pub mod statistics;
pub mod synth;
pub mod types;

pub use distribution::{build_distributions, pool_distributions, ConceptDistribution};
pub use error::{Error, Result};
pub use neighbors::{
    kstar_scan, kstar_scan_oracle, kstar_scan_with, pairwise_distance_block, DistanceMetric,
    NeighborRank, ScanOptions,
};
pub use report::{analyze, compare_reports, AnalysisOptions, ConceptSummary, KStarResult, SpaceReport};
pub use statistics::{
    classify_pattern, count_patterns, gamma_approx, gamma_true, skewness, Classification, Pattern,
    PatternCounts, Skewness,
};
pub use synth::{generate, RecipeParams, SynthSpec};
pub use types::{partition_by_concept, ConceptId, ConceptPartition, EmbeddingSet};
