//! Hierarchical, counter-addressed random streams.
//!
//! A stream is a root seed plus a path of indices (replicate, outcome, column,
//! ...). Each path maps to its own ChaCha8 key, and draws inside a stream are
//! addressed by position, so a value depends only on `(seed, path, position)`
//! and never on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            path: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// The sub-stream at `index` below this one.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        RngStream {
            seed: self.seed,
            path,
        }
    }

    fn key(&self) -> [u8; 32] {
        let mut state = splitmix(self.seed);
        for (depth, &idx) in self.path.iter().enumerate() {
            state = splitmix(state ^ splitmix(idx.wrapping_add((depth as u64) << 56)));
        }
        let mut key = [0u8; 32];
        for (k, chunk) in key.chunks_mut(8).enumerate() {
            state = splitmix(state.wrapping_add(k as u64));
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        key
    }

    /// Generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key())
    }

    /// Generator positioned at 64-bit word `position` of this stream.
    pub fn rng_at(&self, position: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_word_pos(u128::from(position) * 2);
        rng
    }
}
