//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded from a
//! 64-bit key derived as
//!
//! ```text
//! h0 = splitmix64(global_seed)
//! h1 = splitmix64(h0 ^ fnv1a64(module_tag))
//! h2 = splitmix64(h1 ^ cell_id)
//! key = splitmix64(h2 ^ replication_id)
//! ```
//!
//! Cell ids are `fnv1a64` of a canonical cell label (see [`cell_id`]). The
//! derivation depends only on these four values, so replications can run in
//! any order and any cell can be re-run in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Global seed used when none is configured.
pub const DEFAULT_SEED: u64 = 20260504;

pub type StreamRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Stable id for a cell label such as `"lss/weak/d=1/n=200"`.
pub fn cell_id(label: &str) -> u64 {
    fnv1a64(label.as_bytes())
}

pub fn derive_seed(global: u64, tag: &str, cell: u64, rep: u64) -> u64 {
    let h = splitmix64(global);
    let h = splitmix64(h ^ fnv1a64(tag.as_bytes()));
    let h = splitmix64(h ^ cell);
    splitmix64(h ^ rep)
}

pub fn stream(global: u64, tag: &str, cell: u64, rep: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(global, tag, cell, rep))
}

pub fn from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
