//! Seed-derived random streams.
//!
//! Every consumer draws from its own ChaCha stream of the trial seed, so
//! runs that differ only in caching see the same mobility and measurement
//! noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TOPOLOGY_STREAM: u64 = 0;
pub const CHANNEL_STREAM: u64 = u64::MAX;
const STREAMS_PER_MUE: u64 = 3;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn mobility_stream(seed: u64, mue: usize) -> ChaCha8Rng {
    stream(seed, 1 + STREAMS_PER_MUE * mue as u64)
}

pub fn measurement_stream(seed: u64, mue: usize) -> ChaCha8Rng {
    stream(seed, 2 + STREAMS_PER_MUE * mue as u64)
}

pub fn interference_stream(seed: u64, mue: usize) -> ChaCha8Rng {
    stream(seed, 3 + STREAMS_PER_MUE * mue as u64)
}
