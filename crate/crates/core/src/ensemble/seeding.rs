//! Order-independent per-trajectory RNG streams.
//!
//! Trajectory `i` of an ensemble with base seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(splitmix64(s ^ splitmix64(i)))`, so its
//! random numbers depend only on `(s, i)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The splitmix64 finaliser (Steele, Lea & Flood).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn particle_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index))
}

pub fn particle_rng(base_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(particle_seed(base_seed, index))
}
