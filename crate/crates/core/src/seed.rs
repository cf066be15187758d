//! Seed derivation.
//!
//! Every random stream is a ChaCha8 generator seeded with
//! `derive(master, tag, index)`:
//!
//! ```text
//! h  = FNV-1a-64(tag bytes)
//! z  = splitmix64(master ^ h.rotate_left(32))
//! z  = splitmix64(z ^ (index * 0x9E3779B97F4A7C15))   (wrapping)
//! ```
//!
//! where `splitmix64(x)` is the finalizer of Steele et al.'s SplitMix64
//! applied to `x + 0x9E3779B97F4A7C15`. Streams depend only on
//! `(master, tag, index)`, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The random-number generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Master seed of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed for stream `index` of the experiment named `tag`.
    pub fn derive(self, tag: &str, index: u64) -> u64 {
        let h = fnv1a64(tag.as_bytes());
        let z = splitmix64(self.0 ^ h.rotate_left(32));
        splitmix64(z ^ index.wrapping_mul(GOLDEN_GAMMA))
    }

    pub fn rng(self, tag: &str, index: u64) -> SimRng {
        SimRng::seed_from_u64(self.derive(tag, index))
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}
