//! Reproducible random substreams.
//!
//! Every stochastic step draws from a generator keyed by a master seed and a
//! small tuple of indices, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one 64-bit key.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &w| splitmix(acc ^ splitmix(w)))
}

pub fn rng_for(words: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(mix(words))
}

/// Identifies the run streams belonging to one tile set in one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub index: u64,
}

impl StreamKey {
    pub fn new(seed: u64, index: u64) -> Self {
        StreamKey { seed, index }
    }

    /// Generator for assembly run `run`.
    pub fn run_rng(&self, run: u32) -> StreamRng {
        rng_for(&[self.seed, self.index, run as u64])
    }
}
