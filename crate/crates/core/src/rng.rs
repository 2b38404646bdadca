//! Seeded randomness. Every stochastic choice in the crate goes through here.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent child stream for component `tag` under `seed`.
pub fn derive(seed: u64, tag: u64) -> Rng {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    seeded(z ^ (z >> 31))
}

/// `k` run seeds drawn from the child stream `tag` of `seed`.
pub fn seeds(seed: u64, tag: u64, k: usize) -> Vec<u64> {
    use rand::RngCore;
    let mut r = derive(seed, tag);
    (0..k).map(|_| r.next_u64()).collect()
}
