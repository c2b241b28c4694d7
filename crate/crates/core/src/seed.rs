//! Seed splitting.
//!
//! A run has one global seed. Every component that needs randomness asks
//! for its own stream with [`derive_seed`]`(seed, tag)`; the tag is a short
//! ASCII label such as `"batch"` or `"refactor/epoch"`. The rule is:
//!
//! ```text
//! h = FNV-1a-64(tag)
//! stream_seed = splitmix64(seed ^ h)
//! ```
//!
//! Adding a new tag never changes the streams handed to existing tags.

use rand_chacha::rand_core::SeedableRng;

/// The generator used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(tag: &str) -> u64 {
    tag.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the 64-bit stream seed for `tag` from a parent seed.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    splitmix64(seed ^ fnv1a(tag))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
