//! Seeded randomness.
//!
//! Every random quantity in the crate comes from a `ChaCha8Rng` seeded with a
//! 64-bit value. Parallel work derives its seeds from a master seed with
//! [`derive_seed`], a counter-based split: seed `i` of domain `d` is a fixed
//! function of `(master, d, i)` alone, so results never depend on which
//! thread ran which task or in what order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::kernels::UnitPoint;

/// Substream domains. Each consumer of a master seed uses its own domain so
/// that, e.g., trajectory 3's `x` and trajectory 3's selection variables never
/// share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Selection = 1,
    EvaluationPoint = 2,
    Realization = 3,
}

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `index` within `domain`, derived from `master`.
pub fn derive_seed(master: u64, domain: Domain, index: u64) -> u64 {
    let keyed = splitmix64(master ^ splitmix64(domain as u64));
    splitmix64(keyed ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// The generator behind every stream.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw a uniform 128-bit fraction. The lowest bit is forced to one, so the
/// point is never a dyadic rational with denominator below `2^128`.
pub fn random_unit_point<R: RngCore>(rng: &mut R) -> UnitPoint {
    let hi = rng.next_u64() as u128;
    let lo = rng.next_u64() as u128;
    UnitPoint::from_bits((hi << 64) | lo | 1)
}

/// Bernoulli threshold for probability `p`: a draw `u` succeeds when
/// `u < floor(p * 2^64)`. Stored as `u128` so `p = 1` maps to `2^64`.
pub fn bernoulli_threshold(p: f64) -> u128 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1u128 << 64
    } else {
        // p * 2^64 is exact in f64; the cast truncates toward zero
        (p * 18_446_744_073_709_551_616.0) as u128
    }
}
