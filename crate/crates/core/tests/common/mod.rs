//! Seeded instance suites shared by the integration tests.

#![allow(dead_code)]

use hybrid_core::gen::{generate, GenKind, GenParams};
use hybrid_core::oracle;
use hybrid_core::{Instance, MetricSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn instance(kind: GenKind, n: usize, m: usize, k: usize, r: f64, seed: u64) -> Instance {
    generate(&GenParams {
        kind,
        n,
        m,
        dim: 2,
        k,
        r,
        z: 1.0,
        seed,
    })
    .unwrap()
    .into_instance()
    .unwrap()
}

pub fn with_radius(inst: &Instance, r: f64) -> Instance {
    Instance::new(inst.space.clone(), inst.k, r, inst.z).unwrap()
}

pub const KINDS: [GenKind; 3] = [
    GenKind::EuclideanUniform,
    GenKind::EuclideanPlanted,
    GenKind::MatrixRandomMetric,
];

/// Radius schedule: zero, the optimal k-center radius, or a random fraction of it.
pub fn pick_radius(space: &MetricSpace, k: usize, i: usize, rng: &mut ChaCha8Rng) -> f64 {
    let rstar = oracle::kcenter_radius(space, k).unwrap();
    match i % 4 {
        0 => 0.0,
        1 => rstar,
        _ => rng.gen_range(0.05..0.95) * rstar,
    }
}

/// Small discrete instances: `n <= 12`, `|F| <= 8`, `k` in 1..=3.
pub fn small_suite(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(6..=12);
            let m = rng.gen_range(3..=8);
            let k = 1 + i % 3;
            let base = instance(KINDS[i % 3], n, m, k, 0.0, rng.gen());
            let r = pick_radius(&base.space, k, i, &mut rng);
            with_radius(&base, r)
        })
        .collect()
}
