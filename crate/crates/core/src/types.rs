//! Labeled embedding sets and their partition into concepts.
//!
//! Concept identifiers are re-indexed densely to `0..C` at construction so
//! every downstream array can be indexed by concept. The original identifier
//! of each dense concept is kept and written back into reports.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Dense concept identifier in `0..concept_count`.
pub type ConceptId = u32;

/// `n` labeled points in `d` dimensions. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    points: Vec<f32>,
    n: usize,
    dim: usize,
    labels: Vec<ConceptId>,
    original_ids: Vec<u64>,
    concept_names: BTreeMap<ConceptId, String>,
    source: Option<String>,
}

impl EmbeddingSet {
    /// Validates a row-major `n × dim` matrix and its labels.
    ///
    /// Labels are arbitrary non-negative integers; they are mapped to dense
    /// ids in ascending order of the original value. `names` is keyed by the
    /// original label.
    pub fn new(
        points: Vec<f32>,
        dim: usize,
        labels: &[u64],
        names: &BTreeMap<u64, String>,
    ) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::TooFewSamples { found: n });
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let expected = n.checked_mul(dim).ok_or(Error::LengthMismatch {
            expected: usize::MAX,
            actual: points.len(),
        })?;
        if points.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: points.len() });
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { row: pos / dim, col: pos % dim });
        }

        let distinct: BTreeSet<u64> = labels.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(Error::SingleConcept { found: distinct.len() });
        }
        let original_ids: Vec<u64> = distinct.into_iter().collect();
        let dense: BTreeMap<u64, ConceptId> = original_ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as ConceptId))
            .collect();
        let labels = labels.iter().map(|l| dense[l]).collect();
        let concept_names = names
            .iter()
            .filter_map(|(id, name)| dense.get(id).map(|&c| (c, name.clone())))
            .collect();

        Ok(EmbeddingSet {
            points,
            n,
            dim,
            labels,
            original_ids,
            concept_names,
            source: None,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; a valid set holds at least two samples.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[f32] {
        &self.points
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Dense concept label per sample.
    pub fn labels(&self) -> &[ConceptId] {
        &self.labels
    }

    pub fn concept_count(&self) -> usize {
        self.original_ids.len()
    }

    /// Original identifier of dense concept `c`.
    pub fn original_id(&self, c: ConceptId) -> u64 {
        self.original_ids[c as usize]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    /// Labels mapped back to their original identifiers.
    pub fn original_labels(&self) -> Vec<u64> {
        self.labels.iter().map(|&c| self.original_id(c)).collect()
    }

    pub fn concept_name(&self, c: ConceptId) -> Option<&str> {
        self.concept_names.get(&c).map(String::as_str)
    }

    /// Names keyed by dense concept id.
    pub fn concept_names(&self) -> &BTreeMap<ConceptId, String> {
        &self.concept_names
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// Number of samples in each dense concept.
    pub fn concept_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.concept_count()];
        for &c in &self.labels {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

/// The samples belonging to one concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptPartition {
    pub concept: ConceptId,
    /// Strictly increasing row indices into the parent set.
    pub members: Vec<usize>,
}

impl ConceptPartition {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Groups sample indices by concept, one partition per dense concept id.
pub fn partition_by_concept(set: &EmbeddingSet) -> Vec<ConceptPartition> {
    let mut parts: Vec<ConceptPartition> = (0..set.concept_count())
        .map(|c| ConceptPartition { concept: c as ConceptId, members: Vec::new() })
        .collect();
    for (i, &c) in set.labels().iter().enumerate() {
        parts[c as usize].members.push(i);
    }
    parts
}
