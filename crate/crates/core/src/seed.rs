//! Stable seed derivation.
//!
//! Every experiment row gets its own RNG stream. The per-row seed is obtained by
//! folding the row identifiers into the base seed with the SplitMix64 finalizer:
//!
//! ```text
//! h0 = splitmix64(base)
//! h_{i+1} = splitmix64(h_i ^ part_i)
//! ```
//!
//! The mapping does not depend on platform, thread count, or execution order, so
//! any single row can be re-run in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SbmRng = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

/// Encodes a real-valued identifier (such as an exponent) for [`derive_seed`].
pub fn real_tag(x: f64) -> u64 {
    x.to_bits()
}

pub fn rng_from_seed(seed: u64) -> SbmRng {
    ChaCha8Rng::seed_from_u64(seed)
}
