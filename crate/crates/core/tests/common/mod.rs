//! Brute-force oracles shared by the integration tests. None of these call
//! into the code paths they are used to check.
#![allow(dead_code)]

use gaplab::summation::NeumaierSum;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform float in [0, 1) with 53 random bits.
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| uniform(rng)).collect()
}

fn count_le(points: &[f64], a: f64) -> usize {
    points.iter().filter(|&&y| y <= a).count()
}

fn count_lt(points: &[f64], a: f64) -> usize {
    points.iter().filter(|&&y| y < a).count()
}

/// Star discrepancy by evaluating `#{y <= a}/N - a` and its left limit at
/// every candidate `a` in {0, 1} and the points, counting by linear scan.
pub fn brute_star(points: &[f64]) -> f64 {
    let n = points.len() as f64;
    let mut best: f64 = 0.0;
    let candidates = points.iter().copied().chain([0.0, 1.0]);
    for a in candidates {
        best = best
            .max((count_le(points, a) as f64 / n - a).abs())
            .max((count_lt(points, a) as f64 / n - a).abs());
    }
    best
}

/// Extremal discrepancy over every interval whose ends are 0, 1 or a point,
/// each end open or closed.
pub fn brute_extremal(points: &[f64]) -> f64 {
    let n = points.len() as f64;
    let mut ends: Vec<f64> = points.to_vec();
    ends.extend([0.0, 1.0]);
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut best: f64 = 0.0;
    for (i, &a) in ends.iter().enumerate() {
        for &b in &ends[i..] {
            let closed = points.iter().filter(|&&y| a <= y && y <= b).count() as f64;
            let open = points.iter().filter(|&&y| a < y && y < b).count() as f64;
            let left_open = points.iter().filter(|&&y| a < y && y <= b).count() as f64;
            let right_open = points.iter().filter(|&&y| a <= y && y < b).count() as f64;
            for c in [closed, open, left_open, right_open] {
                best = best.max((c / n - (b - a)).abs());
            }
        }
    }
    best
}

/// Sum of cos(2 pi n x) with the argument reduced in exact rational
/// arithmetic: x = num/den, so n x mod 1 = (n num mod den)/den.
pub fn direct_cos_sum_rational<I: IntoIterator<Item = u64>>(ns: I, num: u64, den: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for n in ns {
        let r = ((n as u128 * num as u128) % den as u128) as f64 / den as f64;
        acc.add((std::f64::consts::TAU * r).cos());
    }
    acc.value()
}
