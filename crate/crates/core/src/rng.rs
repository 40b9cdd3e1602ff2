//! Per-realization random streams.
//!
//! Every consumer draws from its own ChaCha stream keyed by
//! `(seed, realization, purpose)`, so results never depend on the order in
//! which realizations are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    OpenFaults = 0,
    Spread = 1,
    Messages = 2,
    Noise = 3,
    Bootstrap = 4,
}

pub fn stream_rng(seed: u64, realization: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization.wrapping_mul(8).wrapping_add(stream as u64));
    rng
}
