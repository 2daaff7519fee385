//! Deterministic random streams.
//!
//! Every sampler in the crate draws from a ChaCha stream keyed by
//! `(seed, stream)`, so work split into fixed-size blocks produces the same
//! numbers regardless of how many threads process the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Block size used when splitting sampling work across threads.
pub const BLOCK: usize = 4096;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// FNV-1a over the bit patterns of a float slice; used to derive per-object seeds.
pub fn hash_f64s(values: impl IntoIterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}
