//! Keyed random streams.
//!
//! Every random draw in the crate comes from a ChaCha stream whose seed is a
//! pure function of a master seed and a short key path (repetition, column,
//! block, ...). Results therefore do not depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a key path.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    let mut h = mix(master.wrapping_add(GOLDEN));
    for (depth, &k) in keys.iter().enumerate() {
        h = mix(h ^ mix(k.wrapping_add(GOLDEN.wrapping_mul(depth as u64 + 2))));
    }
    h
}

/// A generator for the stream keyed by `(master, keys)`.
pub fn stream(master: u64, keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, keys))
}
