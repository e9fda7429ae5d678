//! Seeding rules.
//!
//! Every random draw comes from ChaCha8 seeded through `seed_from_u64`.
//! Independent noise sources inside one realization (one per AM carrier, a
//! single one for the MA and AR schemes) use ChaCha stream `j` of the same
//! key. Monte Carlo replicate `r` of an experiment at sample size `n` uses
//! seed [`replicate_seed`]`(base, n, r)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Generator for noise source `stream` of the realization keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One `N(0, 1)` draw.
#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` at sample size `n` under base seed `base`.
pub fn replicate_seed(base: u64, n: usize, index: usize) -> u64 {
    splitmix64(base ^ splitmix64((n as u64) << 32 ^ splitmix64(index as u64)))
}
