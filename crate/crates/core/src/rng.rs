//! Seeded randomness.
//!
//! Every random draw descends from one 64-bit seed. A ChaCha8 stream is picked
//! by `(purpose << 32) | index`, so separate purposes never share a stream,
//! and independent trials use child seeds mixed from `(seed, trial)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes.
pub mod purpose {
    pub const CLASS_SAMPLING: u64 = 1;
    pub const PROBLEM_DRAW: u64 = 2;
    pub const PROVER: u64 = 3;
    pub const EVALUATION: u64 = 4;
    pub const SEQUENCE: u64 = 5;
}

pub fn stream(seed: u64, purpose: u64, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 32) | index as u64);
    rng
}

/// Seed for independent trial `trial` under `seed` (splitmix64 finalizer).
pub fn child_seed(seed: u64, trial: u64) -> u64 {
    let mut z =
        (seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15)).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
