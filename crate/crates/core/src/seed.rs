//! Deterministic seed derivation.
//!
//! Parallel loops (k-means restarts, permutations, CV folds) draw from
//! streams keyed by `(master, index)` so results do not depend on the number
//! of worker threads or on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a counter.
pub fn derive(master: u64, index: u64) -> u64 {
    mix(mix(master) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// RNG for the `index`-th stream under `master`.
pub fn stream(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Plain seeded RNG.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
