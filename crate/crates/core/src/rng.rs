//! Seed handling.
//!
//! All randomness flows through ChaCha8 (`rand_chacha::ChaCha8Rng`), a
//! counter-based generator whose output is fixed across platforms. A single
//! user seed is split into independent streams, one per purpose, so graph
//! generation and solving never share a sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Independent stream identifiers derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Generate = 1,
    Sample = 2,
    GreedyOrder = 3,
    PartitionSubset = 4,
    PartitionEdges = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 finalizer applied to `base + index`, used to derive per-trial seeds.
pub fn mix(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
