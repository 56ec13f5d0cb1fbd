//! Seeded random streams.
//!
//! Every stochastic routine takes either an explicit RNG or a master seed.
//! Parallel work is split into fixed-size chunks, and chunk `c` always draws
//! from stream `c` of the master seed, so results do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per parallel chunk. Changing this changes seeded outputs.
pub const CHUNK_SIZE: usize = 1024;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `count` items into `(chunk index, chunk length)` pairs.
pub fn chunks(count: usize) -> impl Iterator<Item = (u64, usize)> {
    let n_chunks = count.div_ceil(CHUNK_SIZE);
    (0..n_chunks).map(move |c| {
        let len = CHUNK_SIZE.min(count - c * CHUNK_SIZE);
        (c as u64, len)
    })
}
