//! Trigonometric sums along arithmetic progressions.
//!
//! For a block `S_k = { c + i*r : i = 0..lambda }` and frequency `j`,
//!
//! ```text
//! sum_i cos(2 pi j (c + i r) x) = R_j(x) * cos(pi j M x),
//! R_j(x) = sin(lambda pi r j x) / sin(pi r j x),   M = 2c + (lambda - 1) r,
//! ```
//!
//! and likewise with `sin` in place of the outer `cos`. Every angle is formed
//! from an exactly reduced [`UnitPoint`] before `pi` enters.

use serde::{Deserialize, Serialize};

use super::periodic::TrigPoly;
use super::unit_point::UnitPoint;
use crate::construction::{block_coords, block_set, BlockCoords, PsiTable};
use crate::error::{param, Error, Result};

/// Denominators `|sin(pi m x)|` below this are treated as singular.
pub const SINGULARITY_GUARD: f64 = 1e-12;

/// `sin(lambda pi m x) / sin(pi m x)`.
///
/// When `m x` is exactly an integer `q` the removable singularity is filled in
/// with its limit `lambda * (-1)^((lambda-1) q)`; denominators that are merely
/// tiny raise [`Error::Singular`].
pub fn dirichlet_ratio(lambda: u64, m: u128, x: UnitPoint) -> Result<f64> {
    let half = x.half_mul(m);
    if half == UnitPoint::ZERO {
        return Ok(lambda as f64);
    }
    if half == UnitPoint::HALF {
        let sign = if lambda.is_multiple_of(2) { -1.0 } else { 1.0 };
        return Ok(sign * lambda as f64);
    }
    let den = half.sin_turn();
    if den.abs() < SINGULARITY_GUARD {
        return Err(Error::Singular {
            multiple: m,
            magnitude: den.abs(),
        });
    }
    let Some(lm) = m.checked_mul(lambda as u128) else {
        return param("frequency overflow in Dirichlet ratio");
    };
    Ok(x.half_mul(lm).sin_turn() / den)
}

/// Block coordinates and the phase multiplier `M = 2c + (lambda-1) r`.
fn block_phase(k: u128, lambda: u64, table: &PsiTable) -> Result<(BlockCoords, u128)> {
    let coords = block_coords(k, table)?;
    let first = coords.first_element(lambda, table)?;
    let m = first
        .checked_mul(2)
        .and_then(|v| v.checked_add((lambda as u128 - 1) * coords.r as u128));
    match m {
        Some(m) => Ok((coords, m)),
        None => param("block phase overflows u128"),
    }
}

fn phase(x: UnitPoint, multiplier: u128, j: usize) -> Result<UnitPoint> {
    match multiplier.checked_mul(j as u128) {
        Some(n) => Ok(x.half_mul(n)),
        None => param("phase frequency overflows u128"),
    }
}

/// `G_k(x) = sum_{l in S_k} g(l x)` by direct summation.
pub fn g_block_direct(
    g: &TrigPoly,
    k: u128,
    lambda: u64,
    table: &PsiTable,
    x: UnitPoint,
) -> Result<f64> {
    let set = block_set(k, lambda, table)?;
    Ok(set.iter().map(|l| g.eval(x.mul_wide(l))).sum())
}

/// `G_k(x)` through the closed form. Fails with [`Error::Singular`] when some
/// `|sin(pi r j x)|` is below [`SINGULARITY_GUARD`].
pub fn g_block_closed(
    g: &TrigPoly,
    k: u128,
    lambda: u64,
    table: &PsiTable,
    x: UnitPoint,
) -> Result<f64> {
    if lambda == 0 {
        return param("lambda must be at least 1");
    }
    let (coords, m) = block_phase(k, lambda, table)?;
    let mut acc = 0.0;
    for j in 1..=g.degree() {
        let (a, b) = (g.cos_coeff(j), g.sin_coeff(j));
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let ratio = dirichlet_ratio(lambda, coords.r as u128 * j as u128, x)?;
        let z = phase(x, m, j)?;
        acc += ratio * (a * z.cos_turn() + b * z.sin_turn());
    }
    Ok(acc)
}

/// One evaluation of `G_k(x)`, with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub k: u128,
    pub coords: BlockCoords,
    pub value: f64,
    /// False when the closed form hit the singularity guard and the value
    /// came from direct summation.
    pub closed_form: bool,
}

/// `G_k(x)`, closed form where it is well conditioned and direct summation
/// otherwise.
pub fn block_kernel(
    g: &TrigPoly,
    k: u128,
    lambda: u64,
    table: &PsiTable,
    x: UnitPoint,
) -> Result<KernelEval> {
    let coords = block_coords(k, table)?;
    let (value, closed_form) = match g_block_closed(g, k, lambda, table, x) {
        Ok(v) => (v, true),
        Err(Error::Singular { .. }) => (g_block_direct(g, k, lambda, table, x)?, false),
        Err(e) => return Err(e),
    };
    Ok(KernelEval {
        k,
        coords,
        value,
        closed_form,
    })
}

/// `G_k(x)^2 = diagonal + cross` with
/// `diagonal = sum_j (a_j^2 / 2) R_j^2` and `cross = C_k(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareDecomposition {
    pub diagonal: f64,
    pub cross: f64,
}

impl SquareDecomposition {
    pub fn total(&self) -> f64 {
        self.diagonal + self.cross
    }
}

/// Splits `G_k(x)^2` for a cosine polynomial `g`. Writing
/// `cos_k[m] = cos(pi m M x)`,
///
/// ```text
/// C_k = sum_{j1 != j2} (a_j1 a_j2 / 2) R_j1 R_j2 cos_k[j1 - j2]
///     + sum_{j1, j2}   (a_j1 a_j2 / 2) R_j1 R_j2 cos_k[j1 + j2].
/// ```
pub fn square_decomposition(
    g: &TrigPoly,
    k: u128,
    lambda: u64,
    table: &PsiTable,
    x: UnitPoint,
) -> Result<SquareDecomposition> {
    if !g.is_even() {
        return Err(Error::Unsupported(
            "square decomposition is implemented for cosine polynomials only".into(),
        ));
    }
    if lambda == 0 {
        return param("lambda must be at least 1");
    }
    let (coords, m) = block_phase(k, lambda, table)?;
    let d = g.degree();
    let mut weights = Vec::with_capacity(d);
    for j in 1..=d {
        let a = g.cos_coeff(j);
        let ratio = if a == 0.0 {
            0.0
        } else {
            dirichlet_ratio(lambda, coords.r as u128 * j as u128, x)?
        };
        weights.push(a * ratio);
    }
    let cos_k = (0..=2 * d)
        .map(|mult| phase(x, m, mult).map(UnitPoint::cos_turn))
        .collect::<Result<Vec<f64>>>()?;

    let diagonal = weights.iter().map(|w| w * w / 2.0).sum();
    let mut cross = 0.0;
    for (i1, w1) in weights.iter().enumerate() {
        for (i2, w2) in weights.iter().enumerate() {
            let half = w1 * w2 / 2.0;
            if i1 != i2 {
                cross += half * cos_k[i1.abs_diff(i2)];
            }
            cross += half * cos_k[i1 + i2 + 2];
        }
    }
    Ok(SquareDecomposition { diagonal, cross })
}

/// The cross term `C_k(x)`.
pub fn c_cross_term(
    g: &TrigPoly,
    k: u128,
    lambda: u64,
    table: &PsiTable,
    x: UnitPoint,
) -> Result<f64> {
    square_decomposition(g, k, lambda, table, x).map(|s| s.cross)
}

/// `sum_{k=1}^N cos(2 pi k x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineSum {
    pub value: f64,
    /// Set when `x` is an integer and the sum is simply `N`.
    pub degenerate: bool,
}

/// `sin(N pi x) cos((N+1) pi x) / sin(pi x)`.
pub fn cosine_sum_closed(n: u64, x: UnitPoint) -> CosineSum {
    if x == UnitPoint::ZERO {
        return CosineSum {
            value: n as f64,
            degenerate: true,
        };
    }
    let num = x.half_mul(n as u128).sin_turn() * x.half_mul(n as u128 + 1).cos_turn();
    CosineSum {
        value: num / x.half_mul(1).sin_turn(),
        degenerate: false,
    }
}
