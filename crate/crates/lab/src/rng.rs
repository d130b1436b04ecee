//! Counter-based stream derivation. Every random stream in the workspace
//! is `derive_rng(master, path)` for a structured path of words, so chains,
//! samples, and sweep times get independent, reproducible streams and CFTP
//! can replay the randomness of an absolute sweep time exactly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purpose tags, the first word of every path.
pub const STREAM_CHAIN: u64 = 1;
pub const STREAM_CFTP: u64 = 2;
pub const STREAM_CAMPAIGN: u64 = 3;
pub const STREAM_BOOTSTRAP: u64 = 4;
pub const STREAM_INIT: u64 = 5;

/// splitmix64 finalizer; full-avalanche 64-bit mixer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a ChaCha8 stream from the master seed and a path of words.
/// Paths of different lengths or contents give unrelated streams; the
/// absorption is order-sensitive.
pub fn derive_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    let mut h = mix(master ^ 0x243f6a8885a308d3);
    for &w in path {
        h = mix(h ^ mix(w.wrapping_add(0x9e3779b97f4a7c15)));
    }
    // Length tag keeps [1] and [1, 0] apart.
    h = mix(h ^ (path.len() as u64).wrapping_mul(0xa0761d6478bd642f));
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        let z = mix(h.wrapping_add((i as u64 + 1).wrapping_mul(0xe7037ed1a0b428db)));
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
