//! Counter-based RNG substreams.
//!
//! Every work item in an experiment owns an independent ChaCha8 stream. The
//! stream is keyed by the root seed plus a tuple of integers (for example
//! `[tag, n, graph, repetition, tau_index, p]`). The tuple is folded through
//! SplitMix64 into a 64-bit ChaCha stream id, so a work item's random numbers
//! depend only on its key and never on scheduling order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub mod tag {
    pub const GRAPH: u64 = 1;
    pub const BIPARTITE_GRAPH: u64 = 2;
    pub const RUN: u64 = 3;
    pub const SHOT: u64 = 4;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a key tuple into a stream id.
pub fn stream_id(key: &[u64]) -> u64 {
    key.iter().fold(0x6A09_E667_F3BC_C908, |acc, &k| {
        splitmix64(acc ^ splitmix64(k))
    })
}

pub fn substream(root_seed: u64, key: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream_id(key));
    rng
}
