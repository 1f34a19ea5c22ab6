//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream identified by a
//! `(seed, stream)` pair, so batch computations can hand sample `i` its own
//! substream and stay reproducible regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child stream id from a parent id and a local index.
pub fn child_stream(parent: u64, index: u64) -> u64 {
    parent
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .rotate_left(17)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        ^ index
}
