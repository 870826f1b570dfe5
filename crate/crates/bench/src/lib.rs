//! Shared inputs for the benchmarks.

use lrw::{generate_planted, generate_powerlaw, LabeledGraph, PlantedPartitionSpec, PowerLawSpec};

/// Planted partition with 128 vertices, degree 16 and 4 clusters.
pub fn planted(q: f64, seed: u64) -> LabeledGraph {
    generate_planted(&PlantedPartitionSpec {
        n: 128,
        d: 16.0,
        c: 4,
        q,
        rng_seed: seed,
    })
    .expect("valid planted spec")
}

/// Power-law benchmark with `n` vertices and otherwise default bounds.
pub fn powerlaw(n: usize, seed: u64) -> LabeledGraph {
    let spec = PowerLawSpec {
        n,
        cluster_max: PowerLawSpec::default().cluster_max.min(n / 2),
        rng_seed: seed,
        ..Default::default()
    };
    generate_powerlaw(&spec).expect("valid power-law spec")
}
