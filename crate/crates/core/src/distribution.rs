//! Per-concept normalized k* distributions.

use crate::error::{Error, Result};
use crate::types::{partition_by_concept, ConceptId, EmbeddingSet};

/// The k* values of one concept, normalized by the concept's size.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptDistribution {
    pub concept: ConceptId,
    pub size: usize,
    /// Raw k* per member, in member index order.
    pub raw: Vec<u32>,
    /// `raw / size`, each in `(0, 1]`.
    pub normalized: Vec<f64>,
}

impl ConceptDistribution {
    pub fn mean(&self) -> f64 {
        self.normalized.iter().sum::<f64>() / self.normalized.len() as f64
    }

    /// Counts over `bins` equal right-closed bins covering `(0, 1]`.
    ///
    /// Binning uses the exact rational `raw / size`, so values on a bin edge
    /// always fall in the lower bin.
    pub fn histogram(&self, bins: usize) -> Vec<u64> {
        assert!(bins >= 1);
        let mut counts = vec![0u64; bins];
        let size = self.size as u128;
        for &k in &self.raw {
            let upper = (u128::from(k) * bins as u128).div_ceil(size);
            let bin = (upper.max(1) - 1).min(bins as u128 - 1) as usize;
            counts[bin] += 1;
        }
        counts
    }
}

/// Splits raw k* values by concept and divides each by the concept's size.
pub fn build_distributions(set: &EmbeddingSet, raw_kstar: &[u32]) -> Result<Vec<ConceptDistribution>> {
    if raw_kstar.len() != set.len() {
        return Err(Error::LengthMismatch { expected: set.len(), actual: raw_kstar.len() });
    }
    Ok(partition_by_concept(set)
        .into_iter()
        .map(|part| {
            let size = part.len();
            let raw: Vec<u32> = part.members.iter().map(|&i| raw_kstar[i]).collect();
            let normalized = raw.iter().map(|&k| f64::from(k) / size as f64).collect();
            ConceptDistribution { concept: part.concept, size, raw, normalized }
        })
        .collect())
}

/// Concatenates every concept's normalized values in concept order.
pub fn pool_distributions(dists: &[ConceptDistribution]) -> Result<Vec<f64>> {
    if dists.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(dists.iter().flat_map(|d| d.normalized.iter().copied()).collect())
}
