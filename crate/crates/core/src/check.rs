//! Seeded equivalence sweeps between the k* kernel and the reference scan.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::neighbors::{kstar_scan_oracle, DistanceMetric, ORACLE_LIMIT};
use crate::types::EmbeddingSet;
use crate::Error;

const SIZES: [usize; 3] = [200, 1000, 2000];
const DIMS: [usize; 3] = [2, 16, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepInstance {
    pub seed: u64,
    pub n: usize,
    pub dim: usize,
    pub classes: usize,
    pub metric: DistanceMetric,
}

impl SweepInstance {
    /// Gaussian classes with random per-class shifts of scale 1.5σ, labels
    /// assigned round-robin so every class is populated.
    pub fn build(&self) -> Result<EmbeddingSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shifts: Vec<f64> = (0..self.classes * self.dim)
            .map(|_| 1.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let labels: Vec<u64> = (0..self.n).map(|i| (i % self.classes) as u64).collect();
        let mut points = Vec::with_capacity(self.n * self.dim);
        for &l in &labels {
            for k in 0..self.dim {
                let v = shifts[l as usize * self.dim + k] + rng.sample::<f64, _>(StandardNormal);
                points.push(v as f32);
            }
        }
        EmbeddingSet::new(points, self.dim, &labels, &BTreeMap::new())
    }
}

/// `count` instances cycling through sizes {200, 1000, 2000} (capped at
/// `max_n`), dims {2, 16, 64}, 2 to 20 classes and both metrics.
pub fn sweep_instances(count: usize, max_n: usize, base_seed: u64) -> Result<Vec<SweepInstance>> {
    if max_n > ORACLE_LIMIT {
        return Err(Error::InstanceTooLarge { n: max_n, limit: ORACLE_LIMIT });
    }
    let max_n = max_n.max(2);
    Ok((0..count)
        .map(|i| {
            let n = SIZES[i % 3].min(max_n);
            SweepInstance {
                seed: base_seed.wrapping_add(i as u64),
                n,
                dim: DIMS[(i / 3) % 3],
                classes: (2 + (i * 7) % 19).min(n),
                metric: if i % 2 == 0 { DistanceMetric::Euclidean } else { DistanceMetric::Cosine },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub sample: usize,
    pub expected: u32,
    pub actual: u32,
}

pub fn first_mismatch(expected: &[u32], actual: &[u32]) -> Option<Mismatch> {
    if expected.len() != actual.len() {
        let sample = expected.len().min(actual.len());
        return Some(Mismatch {
            sample,
            expected: expected.get(sample).copied().unwrap_or(0),
            actual: actual.get(sample).copied().unwrap_or(0),
        });
    }
    expected
        .iter()
        .zip(actual)
        .position(|(a, b)| a != b)
        .map(|sample| Mismatch { sample, expected: expected[sample], actual: actual[sample] })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceOutcome {
    pub instance: SweepInstance,
    pub mismatches: usize,
    pub first: Option<Mismatch>,
}

/// Runs `scan` against the reference on every instance.
pub fn run_sweep<F>(instances: &[SweepInstance], scan: F) -> Result<Vec<InstanceOutcome>>
where
    F: Fn(&EmbeddingSet, DistanceMetric) -> Result<Vec<u32>>,
{
    instances
        .iter()
        .map(|inst| {
            let set = inst.build()?;
            let expected = kstar_scan_oracle(&set, inst.metric)?;
            let actual = scan(&set, inst.metric)?;
            let mismatches = if expected.len() == actual.len() {
                expected.iter().zip(&actual).filter(|(a, b)| a != b).count()
            } else {
                expected.len().max(actual.len())
            };
            Ok(InstanceOutcome { instance: *inst, mismatches, first: first_mismatch(&expected, &actual) })
        })
        .collect()
}
