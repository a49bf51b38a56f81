//! Seeded random streams.
//!
//! Every episode owns independent ChaCha streams derived from its seed.
//! Channel draws never share a stream with policy decisions, so different
//! policies run on the same seed see identical channels, and policies with
//! the same phase mode see identical phases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Topology = 0,
    Channel = 1,
    Phase = 2,
    Clustering = 3,
}

pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

pub fn from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
