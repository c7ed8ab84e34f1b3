//! Reproducible random substreams.
//!
//! Every consumer of randomness receives an [`RngStream`] value rather than a
//! shared generator. A stream is a `(seed, stream_id)` pair that names a
//! ChaCha8 key and one of its 2^64 independent counter streams, so the draws a
//! task sees never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Names one deterministic sequence of random draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream `index` of this stream.
    ///
    /// Children live under a key derived from both fields of the parent, so
    /// `substream` can be nested to build trees of independent streams.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: self.derive_seed(),
            stream_id: index,
        }
    }

    /// A 64-bit seed derived from this stream, for APIs that take a bare seed.
    pub fn derive_seed(&self) -> u64 {
        splitmix64(self.seed ^ splitmix64(self.stream_id ^ 0x6a09_e667_f3bc_c909))
    }
}

/// SplitMix64 finalizer.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
