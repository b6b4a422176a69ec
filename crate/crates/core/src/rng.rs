//! Seeded generator construction and seed derivation.
//!
//! Every stochastic component draws from a [`SimRng`] seeded from a single
//! 64-bit value. Independent streams (replications, design rows, optimizer
//! evaluations) obtain their seed through [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used everywhere in the crate. ChaCha8 has a documented,
/// platform-independent output stream.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `base`: `splitmix64(base ^ splitmix64(index))`.
///
/// Neighbouring indices and neighbouring bases both land on unrelated
/// seeds, so replication `r` of base seed `s` is an independent stream.
#[inline]
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

/// Maps a unit-interval design coordinate to a run seed.
pub fn seed_from_unit(base: u64, u: f64) -> u64 {
    let bits = (u.clamp(0.0, 1.0) * (1u64 << 53) as f64) as u64;
    derive_seed(base, bits)
}
