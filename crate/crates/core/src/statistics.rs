//! Skewness of k* distributions and the pattern bands derived from it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Population variance at or below which skewness is undefined.
pub const VARIANCE_FLOOR: f64 = 1e-24;

/// Skewness beyond this magnitude leaves the overlapped band.
pub const PATTERN_THRESHOLD: f64 = 0.5;

/// Default number of histogram bins over `(0, 1]`.
pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

/// A population skewness, or `None` when the distribution is degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Skewness {
    pub value: Option<f64>,
    pub n_used: usize,
}

impl Skewness {
    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }
}

/// Moment-based population skewness, `m3 / m2^1.5`, without bias correction.
///
/// Undefined for fewer than three values or when the population variance
/// does not exceed [`VARIANCE_FLOOR`].
pub fn skewness(values: &[f64]) -> Result<Skewness> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { row: pos, col: 0 });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (m2, m3) = values.iter().fold((0.0, 0.0), |(m2, m3), &v| {
        let c = v - mean;
        (m2 + c * c, m3 + c * c * c)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    let value = if values.len() < 3 || m2 <= VARIANCE_FLOOR {
        None
    } else {
        Some(m3 / m2.powf(1.5))
    };
    Ok(Skewness { value, n_used: values.len() })
}

/// Skewness of the pooled distribution over the whole set.
pub fn gamma_true(pooled: &[f64]) -> Result<Skewness> {
    skewness(pooled)
}

/// Mean of per-concept skewness values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxSkewness {
    pub value: f64,
    pub used: usize,
    /// Concepts left out because their skewness is undefined.
    pub excluded: usize,
}

/// Arithmetic mean of the defined per-concept skewness values.
pub fn gamma_approx(per_concept: &[Skewness]) -> Result<ApproxSkewness> {
    let defined: Vec<f64> = per_concept.iter().filter_map(|s| s.value).collect();
    if defined.is_empty() {
        return Err(Error::AllDegenerate);
    }
    Ok(ApproxSkewness {
        value: defined.iter().sum::<f64>() / defined.len() as f64,
        used: defined.len(),
        excluded: per_concept.len() - defined.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Split into sub-clusters with other concepts in between.
    Fractured,
    /// Intermixed with other concepts.
    Overlapped,
    /// One homogeneous cluster.
    Clustered,
}

impl Pattern {
    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::Fractured => "fractured",
            Pattern::Overlapped => "overlapped",
            Pattern::Clustered => "clustered",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub pattern: Pattern,
    /// Set when skewness was undefined and `pattern` came from the mean.
    pub degenerate: bool,
}

/// Assigns the pattern band for a concept.
///
/// `γ > 0.5` is fractured, `γ < -0.5` clustered, and the closed interval in
/// between overlapped. Degenerate distributions lean clustered when the mean
/// normalized k* is at least 0.5 and fractured otherwise.
pub fn classify_pattern(gamma: &Skewness, mean_normalized: f64) -> Classification {
    match gamma.value {
        Some(g) if g > PATTERN_THRESHOLD => Classification { pattern: Pattern::Fractured, degenerate: false },
        Some(g) if g < -PATTERN_THRESHOLD => Classification { pattern: Pattern::Clustered, degenerate: false },
        Some(_) => Classification { pattern: Pattern::Overlapped, degenerate: false },
        None => Classification {
            pattern: if mean_normalized >= 0.5 { Pattern::Clustered } else { Pattern::Fractured },
            degenerate: true,
        },
    }
}

/// Concept counts per pattern. Degenerate concepts are counted only under
/// `degenerate`, so the four fields sum to the concept count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PatternCounts {
    pub fractured: usize,
    pub overlapped: usize,
    pub clustered: usize,
    pub degenerate: usize,
}

impl PatternCounts {
    pub fn total(&self) -> usize {
        self.fractured + self.overlapped + self.clustered + self.degenerate
    }

    pub fn add(&mut self, c: &Classification) {
        if c.degenerate {
            self.degenerate += 1;
            return;
        }
        match c.pattern {
            Pattern::Fractured => self.fractured += 1,
            Pattern::Overlapped => self.overlapped += 1,
            Pattern::Clustered => self.clustered += 1,
        }
    }
}

pub fn count_patterns<'a>(classes: impl IntoIterator<Item = &'a Classification>) -> PatternCounts {
    let mut counts = PatternCounts::default();
    for c in classes {
        counts.add(c);
    }
    counts
}
