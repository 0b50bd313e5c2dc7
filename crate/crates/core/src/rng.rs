//! Seeded generators.
//!
//! Every random draw in the crate goes through ChaCha20 (`rand_chacha`), seeded
//! with `seed_from_u64`. Independent sub-streams for parallel work use the
//! ChaCha stream counter, so a `(seed, stream)` pair always produces the same
//! sequence on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type SpinRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SpinRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn seeded_stream(seed: u64, stream: u64) -> SpinRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
