//! Benchmark inputs for the k* kernels.

use kstar_core::{generate, EmbeddingSet, Pattern, SynthSpec};

/// An overlapped synthetic space with `n` samples across 10 concepts.
pub fn overlapped_space(n: usize, dim: usize) -> EmbeddingSet {
    generate(&SynthSpec::new(Pattern::Overlapped, 10, n / 10, dim, 7)).expect("valid bench spec")
}
