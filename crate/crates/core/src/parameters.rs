//! The limsup constants of the construction and the inverse problem of
//! choosing `(lambda, p)` for a prescribed constant.
//!
//! For block length `lambda` and selection probability `p` the normalized
//! partial sums of `f(n_k x)` have limsup `Lambda * ||f||` with
//! `Lambda = lambda * sqrt(2 p (1-p)) / sqrt(lambda + p)`, and the normalized
//! star discrepancy has limsup `Lambda / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Which normalized quantity a target constant refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Partial sums `sum f(n_k x)` normalized by `sqrt(N log log N) ||f||`.
    Lil,
    /// `N D_N^*` normalized by `sqrt(N log log N)`.
    Discrepancy,
}

pub fn lil_constant(lambda: u64, p: f64) -> f64 {
    let l = lambda as f64;
    l * (2.0 * p * (1.0 - p)).sqrt() / (l + p).sqrt()
}

/// `lambda sqrt(p(1-p)) / (sqrt 2 sqrt(lambda + p))`, computed as half the LIL
/// constant so the two agree bit for bit.
pub fn disc_constant(lambda: u64, p: f64) -> f64 {
    lil_constant(lambda, p) / 2.0
}

/// Nominal density `(lambda + p) / (2 lambda)` of `(n_k)` in the integers.
/// Every selected block contributes all `lambda` of its elements, so the
/// realized density is `(1 + p) / 2`; the two agree only at `lambda = 1`.
pub fn density(lambda: u64, p: f64) -> f64 {
    (lambda as f64 + p) / (2.0 * lambda as f64)
}

pub fn constant(mode: Mode, lambda: u64, p: f64) -> f64 {
    match mode {
        Mode::Lil => lil_constant(lambda, p),
        Mode::Discrepancy => disc_constant(lambda, p),
    }
}

/// Maximizer and maximum of `p -> lil_constant(lambda, p)` on `(0, 1)`,
/// located by golden-section search.
pub fn max_constant(lambda: u64) -> (f64, f64) {
    assert!(lambda >= 1, "lambda must be at least 1");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (lil_constant(lambda, c), lil_constant(lambda, d));
    while hi - lo > 1e-12 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = lil_constant(lambda, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = lil_constant(lambda, d);
        }
    }
    let p = 0.5 * (lo + hi);
    (p, lil_constant(lambda, p))
}

/// Resolved parameters and the constants they produce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub lambda: u64,
    pub p: f64,
    pub lil_constant: f64,
    pub disc_constant: f64,
    pub density: f64,
    /// Largest LIL constant reachable with this `lambda`.
    pub max_lil_constant: f64,
    /// True when the target sits on that maximum (double root).
    pub at_feasibility_boundary: bool,
}

impl ConstantsReport {
    pub fn new(lambda: u64, p: f64) -> Self {
        let (_, max) = max_constant(lambda);
        Self {
            lambda,
            p,
            lil_constant: lil_constant(lambda, p),
            disc_constant: disc_constant(lambda, p),
            density: density(lambda, p),
            max_lil_constant: max,
            at_feasibility_boundary: false,
        }
    }
}

/// Both roots `p_small <= p_large` of
/// `2 lambda^2 p^2 - (2 lambda^2 - L^2) p + L^2 lambda = 0`, the condition
/// `lil_constant(lambda, p) = L`. `None` when the discriminant is negative
/// beyond rounding.
pub fn quadratic_roots(lambda: u64, lil_target: f64) -> Option<(f64, f64)> {
    let l = lambda as f64;
    let t2 = lil_target * lil_target;
    let a = 2.0 * l * l;
    let b = a - t2;
    let c = t2 * l;
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if -disc <= 1e-14 * b * b {
            disc = 0.0;
        } else {
            return None;
        }
    }
    // b > 0 whenever the target is feasible, so avoid cancellation in the
    // smaller root by going through the product of roots
    let q = b + disc.sqrt();
    Some((2.0 * c / q, q / (2.0 * a)))
}

/// Smallest `lambda` whose maximal constant reaches `target`, with the
/// smaller root `p`.
///
/// A zero target is refused: the deterministic sequence `n_k = k` realizes it.
pub fn solve_params(target: f64, mode: Mode) -> Result<ConstantsReport> {
    if !target.is_finite() || target < 0.0 {
        return param(format!("target constant must be finite and positive, got {target}"));
    }
    if target == 0.0 {
        return param("target constant 0 is realized by the deterministic sequence n_k = k");
    }
    let lil_target = match mode {
        Mode::Lil => target,
        Mode::Discrepancy => 2.0 * target,
    };
    // max over p of lil_constant(lambda, .)^2 is below lambda / 2
    let lower = (2.0 * lil_target * lil_target).floor();
    if lower > 1e15 {
        return param(format!("target constant {target} is too large"));
    }
    let mut lambda = (lower as u64).saturating_sub(1).max(1);
    loop {
        let (_, max) = max_constant(lambda);
        if max >= lil_target {
            if let Some((p_small, p_large)) = quadratic_roots(lambda, lil_target) {
                let mut report = ConstantsReport::new(lambda, p_small);
                report.max_lil_constant = max;
                report.at_feasibility_boundary = (p_large - p_small) < 1e-6;
                return Ok(report);
            }
        }
        lambda += 1;
    }
}
