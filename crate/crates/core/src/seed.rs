//! Seed handling shared by sampling, solvers and experiments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in output metadata.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// Documented child-seed rule, recorded alongside `PRNG_NAME`.
pub const CHILD_SEED_RULE: &str = "splitmix64(master_seed ^ splitmix64(trial_index))";

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`, independent of scheduling.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Derived stream for a named purpose (e.g. a solver start vector).
pub(crate) fn derive(seed: u64, purpose: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(purpose ^ 0xA5A5_5A5A_DEAD_BEEF)))
}
