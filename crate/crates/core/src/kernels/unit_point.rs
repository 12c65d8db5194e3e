use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

/// A point of the circle `R/Z` stored as `bits / 2^128`.
///
/// Multiplication by an integer is a wrapping `u128` product, so `<n*x>` is
/// computed exactly for the stored `x` and never accumulates error as `n`
/// grows. Transcendentals are evaluated only on the reduced value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct UnitPoint(u128);

/// `<n * x>`.
pub fn frac_mul(x: UnitPoint, n: u64) -> UnitPoint {
    x.times(n)
}

impl UnitPoint {
    pub const ZERO: UnitPoint = UnitPoint(0);
    pub const HALF: UnitPoint = UnitPoint(1 << 127);

    pub const fn from_bits(bits: u128) -> Self {
        Self(bits)
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    /// Fractional part of a finite `f64`. Exact for every float that is a
    /// multiple of `2^-128` (in particular every float in `[2^-75, 1)`);
    /// smaller remainders are truncated.
    pub fn from_f64(y: f64) -> Self {
        assert!(y.is_finite(), "non-finite point {y}");
        let frac = y - y.floor();
        // frac * 2^128 is exact; values that round up to 2^128 wrap to zero
        let scaled = frac * TWO_POW_128;
        if scaled >= TWO_POW_128 {
            Self(0)
        } else {
            Self(scaled as u128)
        }
    }

    /// `floor(num / den * 2^128) mod 2^128`, i.e. `num/den` rounded down once.
    pub fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let num = (num % den) as u128;
        let den = den as u128;
        let hi = (num << 64) / den;
        let rem = (num << 64) % den;
        let lo = (rem << 64) / den;
        Self((hi << 64) | lo)
    }

    /// The value as a float in `[0, 1)`, truncated to 53 bits.
    pub fn to_f64(self) -> f64 {
        (self.0 >> 75) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn to_signed_f64(self) -> f64 {
        (self.0 as i128) as f64 / TWO_POW_128
    }

    #[inline]
    pub fn times(self, n: u64) -> Self {
        Self(self.0.wrapping_mul(n as u128))
    }

    #[inline]
    pub fn mul_wide(self, n: u128) -> Self {
        Self(self.0.wrapping_mul(n))
    }

    #[inline]
    pub fn plus(self, other: Self) -> Self {
        Self(self.0.wrapping_add(other.0))
    }

    /// `<n * x / 2>`, so that `pi * n * x = 2*pi * half_mul(n)` modulo `2*pi`.
    ///
    /// Writing `bits = 2h + b`, `n*bits/2 = n*h + n*b/2`; the product `n*h` is
    /// exact mod `2^128` and the dropped half unit costs at most `2^-129`.
    #[inline]
    pub fn half_mul(self, n: u128) -> Self {
        let base = n.wrapping_mul(self.0 >> 1);
        if self.0 & 1 == 1 {
            Self(base.wrapping_add(n >> 1))
        } else {
            Self(base)
        }
    }

    #[inline]
    pub fn cos_turn(self) -> f64 {
        (TAU * self.to_signed_f64()).cos()
    }

    #[inline]
    pub fn sin_turn(self) -> f64 {
        (TAU * self.to_signed_f64()).sin()
    }
}
