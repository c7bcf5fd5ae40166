use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The one generator every randomized routine draws from.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
