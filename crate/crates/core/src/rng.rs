//! Deterministic random streams.
//!
//! Every random quantity is drawn from a ChaCha stream selected by a pure
//! function of `(seed, index)`, so work can be split across threads in any
//! way without changing the numbers produced.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Child seed for an independent purpose (trial, selection pool, ...).
pub fn derive_seed(seed: u64, purpose: u64) -> u64 {
    stream(seed, purpose).next_u64()
}

/// Uniform draw from `(0, 1]`; a zero threshold would activate a node with no
/// active in-neighbor.
pub(crate) fn unit_open_closed(rng: &mut impl Rng) -> f64 {
    1.0 - rng.random::<f64>()
}
