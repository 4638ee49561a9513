//! Counter-based random streams: one independent stream per sample index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identifies the stream that produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngTrace {
    pub master_seed: u64,
    pub index: u64,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an unrelated master seed for a named purpose.
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ splitmix64(tag.wrapping_add(0x5eed)))
}

/// The generator for `(master_seed, index)`. Draws within a sample advance
/// the generator's block counter.
pub fn sample_rng(trace: RngTrace) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let mut s = trace.master_seed;
    for chunk in seed.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(trace.index);
    rng
}
