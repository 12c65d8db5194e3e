use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{PsiTable, SelectionStream};
use crate::error::{param, Result};
use crate::kernels::{g_block_direct, TrigPoly, UnitPoint};
use crate::rng::{derive_seed, Domain};
use crate::summation::{compensated_sum, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceValidation {
    /// Sample variance of `sum_{k<=M} xi_k G_k(x)` over the realizations.
    pub empirical: f64,
    /// `p (1-p) sum_{k<=M} G_k(x)^2`.
    pub predicted: f64,
    /// `|empirical - predicted| / predicted`; absent when `predicted` is
    /// numerically zero.
    pub rel_err: Option<f64>,
}

/// `p (1-p) sum_{k in blocks} G_k(x)^2`, the exact variance of
/// `sum_k xi_k G_k(x)` for independent Bernoulli(p) `xi_k`.
pub fn predicted_variance(
    g: &TrigPoly,
    lambda: u64,
    p: f64,
    x: UnitPoint,
    blocks: std::ops::RangeInclusive<u128>,
    table: &PsiTable,
) -> Result<f64> {
    let squares = blocks
        .map(|k| g_block_direct(g, k, lambda, table, x).map(|v| v * v))
        .collect::<Result<Vec<f64>>>()?;
    Ok(p * (1.0 - p) * compensated_sum(squares))
}

/// Compares the sample variance of `sum_{k<=M} xi_k G_k(x)` over `R`
/// independent selection streams with its exact value.
///
/// Realization `i` draws its `xi_k` from substream `i` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn variance_validation(
    g: &TrigPoly,
    lambda: u64,
    p: f64,
    x: UnitPoint,
    blocks: u64,
    realizations: usize,
    seed: u64,
    table: &PsiTable,
) -> Result<VarianceValidation> {
    if !(0.0..=1.0).contains(&p) {
        return param(format!("p must lie in [0, 1], got {p}"));
    }
    if blocks == 0 || blocks as u128 > table.max_index() {
        return param(format!("block count {blocks} outside 1..={}", table.max_index()));
    }
    if realizations < 100 {
        return param(format!("need at least 100 realizations, got {realizations}"));
    }
    let kernels = (1..=blocks as u128)
        .map(|k| g_block_direct(g, k, lambda, table, x))
        .collect::<Result<Vec<f64>>>()?;
    let predicted = p * (1.0 - p) * compensated_sum(kernels.iter().map(|v| v * v));

    let sums: Vec<f64> = (0..realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut xi = SelectionStream::new(p, derive_seed(seed, Domain::Realization, i));
            let mut acc = NeumaierSum::new();
            for &gk in &kernels {
                if xi.next_xi() {
                    acc.add(gk);
                }
            }
            acc.value()
        })
        .collect();
    let r = sums.len() as f64;
    let mean = compensated_sum(sums.iter().copied()) / r;
    let empirical = compensated_sum(sums.iter().map(|s| (s - mean) * (s - mean))) / (r - 1.0);

    let rel_err = (predicted >= 1e-12).then(|| (empirical - predicted).abs() / predicted);
    Ok(VarianceValidation {
        empirical,
        predicted,
        rel_err,
    })
}
