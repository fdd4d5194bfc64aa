//! Counter-based random streams.
//!
//! Every stream is addressed by a 64-bit key. Child keys are a pure function
//! of (parent key, index), so a campaign trial's randomness depends only on
//! the root seed and the trial number, never on scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key of the `index`-th child stream of `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// A generator for the stream addressed by `key`.
pub fn rng(key: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key)
}
