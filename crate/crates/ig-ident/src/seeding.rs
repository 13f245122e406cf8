//! Counter-based random streams.
//!
//! Every stochastic routine in this crate draws from a [`StreamKey`]: a
//! (master seed, path) pair that maps onto one of ChaCha8's 2⁶⁴ independent
//! streams. Trial `k` of any experiment uses `key.child(k)`, so results
//! depend only on the master seed and the trial index — never on worker
//! count or scheduling order. Distinct experiments within one run derive
//! sibling keys via `child` with distinct domain indices.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hierarchical key addressing one ChaCha8 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    master: u64,
    path: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master: master_seed,
            path: 0,
        }
    }

    /// Derives the `index`-th child key. Collisions between distinct paths
    /// are as unlikely as 64-bit hash collisions, which is adequate for
    /// Monte Carlo use.
    pub fn child(&self, index: u64) -> Self {
        Self {
            master: self.master,
            path: splitmix64(self.path ^ splitmix64(index)),
        }
    }

    /// Instantiates the generator for this key.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.path);
        rng
    }
}
