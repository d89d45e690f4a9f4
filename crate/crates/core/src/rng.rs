//! Seeded randomness. Every random choice flows from a 64-bit master seed; per-run
//! seeds are derived by hashing the master seed with the run coordinates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for repetition `rep` of guess `guess` under `master`.
pub fn derive_seed(master: u64, guess: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ guess) ^ rep.rotate_left(32))
}

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}
