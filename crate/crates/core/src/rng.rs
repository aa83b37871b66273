//! Seeded random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha8 stream, selected by
//! `(seed, trial)`. Streams are independent, so trials can run on any number
//! of threads and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// The stream for one trial of a seeded experiment.
pub fn trial_rng(seed: u64, trial: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A generator for one-off use (instance generation, test fixtures).
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
