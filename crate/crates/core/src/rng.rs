//! Seeded, splittable randomness.
//!
//! A [`SeedSpec`] is a `(master seed, stream index)` pair. Sequential draws come
//! from a ChaCha8 generator keyed by the master seed with the stream index
//! selecting the ChaCha stream, so trial `t` of an experiment can be replayed
//! in isolation. Per-pair edge marks are counter based: the uniform attached
//! to pair `(i, j)` is a pure function of the key and the pair, independent of
//! the order in which pairs are visited.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub const fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    /// Derives an independent seed for a named purpose within the same stream.
    pub fn child(self, tag: u64) -> Self {
        Self {
            master: mix64(self.master ^ mix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d))),
            stream: self.stream,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }

    /// Key for counter-based per-pair draws.
    pub fn pair_key(self) -> PairKey {
        PairKey(mix64(self.master ^ mix64(self.stream ^ 0xd1b5_4a32_d192_ed03)))
    }
}

/// Counter-based uniform source indexed by unordered vertex pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairKey(u64);

impl PairKey {
    /// Uniform in `[0, 1)` attached to the pair `{i, j}`.
    #[inline]
    pub fn uniform(self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i as u64, j as u64) } else { (j as u64, i as u64) };
        let h = mix64(self.0 ^ mix64(a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.rotate_left(32)));
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
