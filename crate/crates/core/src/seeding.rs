//! Deterministic splitting of one master seed into independent streams.
//!
//! Realization `r` gets four sub-seeds, one per [`Stream`]:
//!
//! ```text
//! seed(master, r, stream) = splitmix64(splitmix64(master) ^ (4 r + stream))
//! ```
//!
//! Each sub-seed initializes its own ChaCha8 generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Mesh = 0,
    Feedback = 1,
    Drive = 2,
    Shots = 3,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sub_seed(master: u64, realization: u64, stream: Stream) -> u64 {
    splitmix64(splitmix64(master) ^ (realization.wrapping_mul(4) + stream as u64))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The four seeds a single reservoir run consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSeeds {
    pub mesh: u64,
    pub feedback: u64,
    pub drive: u64,
    pub shots: u64,
}

impl RunSeeds {
    pub fn derive(master: u64, realization: u64) -> Self {
        Self {
            mesh: sub_seed(master, realization, Stream::Mesh),
            feedback: sub_seed(master, realization, Stream::Feedback),
            drive: sub_seed(master, realization, Stream::Drive),
            shots: sub_seed(master, realization, Stream::Shots),
        }
    }
}

impl Default for RunSeeds {
    fn default() -> Self {
        Self::derive(0, 0)
    }
}
