//! Shared inputs for the benchmarks.

use std::sync::Arc;

use moga_vrptw::io::{generate_random_instance, GeneratorParams};
use moga_vrptw::{Instance, ObjectiveVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Objective vectors spread over a small grid, so dominance and ties both occur.
pub fn random_objectives(n: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            ObjectiveVector::new(
                rng.random_range(100.0..1000.0),
                rng.random_range(1..12),
                rng.random_range(0.0..500.0),
                rng.random_range(0..25),
            )
        })
        .collect()
}

pub fn instance(customers: u32) -> Arc<Instance> {
    let params = GeneratorParams { customers, tightness: 0.6, seed: 1, ..Default::default() };
    Arc::new(generate_random_instance(&params).expect("generator parameters are valid"))
}
