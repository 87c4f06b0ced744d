use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every random draw in the crate.
pub type SimRng = ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for an independent sub-stream of `seed`, used where items
/// (records, runs) must not depend on each other's draw counts.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
