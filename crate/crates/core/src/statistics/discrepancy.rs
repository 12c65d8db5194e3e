//! Exact discrepancies of finite point sets in `[0, 1)`.
//!
//! With `y_(1) <= ... <= y_(N)` sorted,
//!
//! ```text
//! D_N^* = max_i max(i/N - y_(i), y_(i) - (i-1)/N)
//! D_N   = 1/N + max_i (i/N - y_(i)) - min_i (i/N - y_(i))
//! ```

use serde::{Deserialize, Serialize};

use super::trace::lil_normalizer;
use crate::error::{param, Result};
use crate::kernels::{PeriodicFunction, UnitPoint};

pub const MAX_DYADIC_LEVEL: u32 = 20;

fn sorted_points(points: &[f64]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return param("discrepancy of an empty point set");
    }
    if let Some(bad) = points.iter().find(|y| !(0.0..1.0).contains(*y)) {
        return param(format!("point {bad} outside [0, 1)"));
    }
    let mut ys = points.to_vec();
    ys.sort_by(f64::total_cmp);
    Ok(ys)
}

fn star_sorted(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    ys.iter()
        .enumerate()
        .map(|(i, &y)| {
            let upper = (i + 1) as f64 / n - y;
            let lower = y - i as f64 / n;
            upper.max(lower)
        })
        .fold(0.0, f64::max)
}

fn extremal_sorted(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &y) in ys.iter().enumerate() {
        let v = (i + 1) as f64 / n - y;
        hi = hi.max(v);
        lo = lo.min(v);
    }
    1.0 / n + hi - lo
}

/// `sup_{0 <= a <= 1} | #{y_k in [0, a]} / N - a |`.
pub fn star_discrepancy(points: &[f64]) -> Result<f64> {
    Ok(star_sorted(&sorted_points(points)?))
}

/// Supremum over all subintervals `[a, b]` of `[0, 1]`.
pub fn extremal_discrepancy(points: &[f64]) -> Result<f64> {
    Ok(extremal_sorted(&sorted_points(points)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscReport {
    pub n: u64,
    pub d_star: f64,
    pub d_ext: f64,
    /// `N D_N^* / sqrt(N ln ln N)`; absent below `N = 16`.
    pub scaled: Option<f64>,
}

pub fn disc_report(points: &[f64]) -> Result<DiscReport> {
    let ys = sorted_points(points)?;
    let n = ys.len() as u64;
    let d_star = star_sorted(&ys);
    Ok(DiscReport {
        n,
        d_star,
        d_ext: extremal_sorted(&ys),
        scaled: lil_normalizer(n).map(|norm| n as f64 * d_star / norm),
    })
}

/// Count-scale discrepancies restricted to dyadic families at level `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicDiscrepancies {
    pub level: u32,
    /// `max_{0 < s < 2^L} |sum_k I_[0, s 2^-L](y_k)|`, the anchored intervals
    /// ending on the dyadic grid. The right end is taken both closed and
    /// open, matching the supremum in `D_N^*`.
    pub coarse: f64,
    /// `max_s sup_{0 <= a <= 2^-L} |sum_k I_[s 2^-L, s 2^-L + a](y_k)|`, the
    /// short intervals starting on the grid.
    pub fine: f64,
}

impl DyadicDiscrepancies {
    /// `coarse <= N D_N^* <= coarse + fine`, up to `tol`.
    pub fn sandwiches(&self, n_star: f64, tol: f64) -> bool {
        self.coarse <= n_star + tol && n_star <= self.coarse + self.fine + tol
    }
}

pub fn dyadic_discrepancies(points: &[f64], level: u32) -> Result<DyadicDiscrepancies> {
    if level == 0 || level > MAX_DYADIC_LEVEL {
        return param(format!("dyadic level must lie in 1..={MAX_DYADIC_LEVEL}, got {level}"));
    }
    let ys = sorted_points(points)?;
    let n = ys.len() as f64;
    let cells = 1u64 << level;
    let width = (level as f64).exp2().recip();

    let mut coarse: f64 = 0.0;
    for s in 1..cells {
        let c = s as f64 * width;
        let closed = ys.partition_point(|&y| y <= c) as f64;
        let open = ys.partition_point(|&y| y < c) as f64;
        coarse = coarse.max((closed - n * c).abs()).max((open - n * c).abs());
    }

    let mut fine: f64 = 0.0;
    for s in 0..cells {
        let c = s as f64 * width;
        let start = ys.partition_point(|&y| y < c);
        let end = ys.partition_point(|&y| y <= c + width);
        for (offset, &y) in ys[start..end].iter().enumerate() {
            let u = y - c;
            let before = offset as f64 - n * u;
            let through = (offset + 1) as f64 - n * u;
            fine = fine.max(before.abs()).max(through.abs());
        }
        fine = fine.max(((end - start) as f64 - n * width).abs());
    }

    Ok(DyadicDiscrepancies {
        level,
        coarse,
        fine,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoksmaCheck {
    /// `|N^-1 sum f(y_k)|`.
    pub lhs: f64,
    /// `Var(f) D_N^*`.
    pub rhs: f64,
    pub holds: bool,
}

/// Koksma's inequality for a mean-zero `f`.
pub fn koksma_check(f: &PeriodicFunction, points: &[f64]) -> Result<KoksmaCheck> {
    let d_star = star_discrepancy(points)?;
    let mean = points
        .iter()
        .map(|&y| f.eval(UnitPoint::from_f64(y)))
        .sum::<f64>()
        / points.len() as f64;
    let lhs = mean.abs();
    let rhs = f.variation_bound() * d_star;
    Ok(KoksmaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}
