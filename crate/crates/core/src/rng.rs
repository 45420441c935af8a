//! Deterministic RNG stream derivation.
//!
//! Every random decision in a run is drawn from a ChaCha8 stream whose seed
//! is a pure function of the master seed plus a context tag, so distinct
//! contexts (GA decisions, per-evaluation replicates, injection placement)
//! never share state and full runs replay bit-identically.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, stable across platforms.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Combine seed components into one 64-bit stream seed.
pub fn mix(parts: &[u64]) -> u64 {
    let mut acc = 0x243f6a8885a308d3u64; // pi fractional bits
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

/// FNV-1a over a label, for mixing string tags into seeds.
pub fn hash_label(label: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Context tags keeping unrelated streams apart.
pub mod tag {
    pub const GROW: u64 = 0x47524f57; // "GROW"
    pub const TREAT: u64 = 0x54524541;
    pub const INJECT: u64 = 0x494e4a45;
    pub const GA: u64 = 0x4741;
    pub const INIT_POP: u64 = 0x504f50;
    pub const EVAL: u64 = 0x4556414c;
}

pub fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}
