//! Synthetic latent spaces exhibiting each k* pattern.
//!
//! Every recipe draws from a single `ChaCha8Rng` seeded with
//! `seed_from_u64(spec.seed)`. Concepts are generated in order `0..C`; within a
//! concept any per-concept center draws come first, then rows in output order,
//! each row as `dim` standard normals scaled by `noise_scale`. Rows are grouped
//! by concept. All arithmetic is done in `f64` and rounded to `f32` last.
//!
//! - Clustered: one blob per concept, centers `cluster_separation · σ` apart
//!   on the first axis.
//! - Fractured: each concept is split into `fracture_parts` sub-blobs laid out
//!   on the first axis in the order `(part 0: concepts 0..C), (part 1: ...)`,
//!   `fracture_spacing · σ` apart, so every pair of a concept's sub-blobs has
//!   other concepts between them.
//! - Overlapped: a fraction `overlap_core_fraction` of each concept sits in
//!   an isolated core blob (`overlap_core_separation · σ` apart on the first
//!   axis); the rest is drawn around one shared center with a per-concept
//!   offset of norm at most `overlap_offset · σ`. Points in the shared region
//!   get low k*, core points high k*.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::statistics::Pattern;
use crate::types::EmbeddingSet;

/// Geometry ratios, in units of the noise scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeParams {
    pub cluster_separation: f64,
    pub fracture_spacing: f64,
    pub fracture_parts: usize,
    pub overlap_offset: f64,
    pub overlap_core_fraction: f64,
    pub overlap_core_separation: f64,
}

impl Default for RecipeParams {
    fn default() -> Self {
        RecipeParams {
            cluster_separation: 20.0,
            fracture_spacing: 2.0,
            fracture_parts: 3,
            overlap_offset: 0.5,
            overlap_core_fraction: 0.5,
            overlap_core_separation: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub pattern: Pattern,
    pub concepts: usize,
    pub samples_per_concept: usize,
    pub dim: usize,
    pub seed: u64,
    pub noise_scale: f64,
    pub params: RecipeParams,
}

impl SynthSpec {
    pub fn new(pattern: Pattern, concepts: usize, samples_per_concept: usize, dim: usize, seed: u64) -> Self {
        SynthSpec {
            pattern,
            concepts,
            samples_per_concept,
            dim,
            seed,
            noise_scale: 1.0,
            params: RecipeParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.concepts < 2 {
            return fail(format!("concepts must be at least 2, got {}", self.concepts));
        }
        if self.samples_per_concept < 8 {
            return fail(format!("samples per concept must be at least 8, got {}", self.samples_per_concept));
        }
        if self.dim < 2 {
            return fail(format!("dim must be at least 2, got {}", self.dim));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale > 0.0) {
            return fail(format!("noise scale must be positive, got {}", self.noise_scale));
        }
        let p = &self.params;
        for (name, v) in [
            ("cluster separation", p.cluster_separation),
            ("fracture spacing", p.fracture_spacing),
            ("overlap core separation", p.overlap_core_separation),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if !(p.overlap_offset.is_finite() && p.overlap_offset >= 0.0) {
            return fail(format!("overlap offset must be non-negative, got {}", p.overlap_offset));
        }
        if p.fracture_parts < 2 || p.fracture_parts > self.samples_per_concept {
            return fail(format!("fracture parts must be in 2..={}, got {}", self.samples_per_concept, p.fracture_parts));
        }
        let core = self.core_count();
        if !(p.overlap_core_fraction > 0.0 && p.overlap_core_fraction < 1.0) || core == 0 || core == self.samples_per_concept {
            return fail(format!("overlap core fraction must leave both regions non-empty, got {}", p.overlap_core_fraction));
        }
        Ok(())
    }

    fn core_count(&self) -> usize {
        (self.params.overlap_core_fraction * self.samples_per_concept as f64).round() as usize
    }

    fn describe(&self) -> String {
        format!(
            "synth:{}:C={}:m={}:d={}:seed={}",
            self.pattern, self.concepts, self.samples_per_concept, self.dim, self.seed
        )
    }
}

struct Builder {
    rng: ChaCha8Rng,
    dim: usize,
    sigma: f64,
    points: Vec<f32>,
    labels: Vec<u64>,
}

impl Builder {
    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn blob(&mut self, center: &[f64], count: usize, label: u64) {
        for _ in 0..count {
            for &c in center {
                let v = c + self.sigma * self.normal();
                self.points.push(v as f32);
            }
            self.labels.push(label);
        }
    }

    fn on_axis(&self, position: f64) -> Vec<f64> {
        let mut center = vec![0.0; self.dim];
        center[0] = position * self.sigma;
        center
    }
}

/// Sizes of `parts` near-equal groups summing to `total`; earlier groups take
/// the remainder.
fn split_evenly(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|j| total / parts + usize::from(j < total % parts)).collect()
}

pub fn generate(spec: &SynthSpec) -> Result<EmbeddingSet> {
    spec.validate()?;
    let m = spec.samples_per_concept;
    let c_count = spec.concepts;
    let p = &spec.params;
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        dim: spec.dim,
        sigma: spec.noise_scale,
        points: Vec::with_capacity(c_count * m * spec.dim),
        labels: Vec::with_capacity(c_count * m),
    };

    for c in 0..c_count {
        let label = c as u64;
        match spec.pattern {
            Pattern::Clustered => {
                let center = b.on_axis(c as f64 * p.cluster_separation);
                b.blob(&center, m, label);
            }
            Pattern::Fractured => {
                for (j, size) in split_evenly(m, p.fracture_parts).into_iter().enumerate() {
                    let slot = j * c_count + c;
                    let center = b.on_axis(slot as f64 * p.fracture_spacing);
                    b.blob(&center, size, label);
                }
            }
            Pattern::Overlapped => {
                let mut direction: Vec<f64> = (0..spec.dim).map(|_| b.normal()).collect();
                let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
                let radius = p.overlap_offset * spec.noise_scale * b.rng.random::<f64>();
                direction.iter_mut().for_each(|v| *v *= radius / norm);

                let core = b.on_axis((c + 1) as f64 * p.overlap_core_separation);
                let core_count = spec.core_count();
                b.blob(&core, core_count, label);
                b.blob(&direction, m - core_count, label);
            }
        }
    }

    Ok(EmbeddingSet::new(b.points, spec.dim, &b.labels, &BTreeMap::new())?.with_source(spec.describe()))
}
