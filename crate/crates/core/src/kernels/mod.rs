//! Exact fractional parts, mean-zero periodic test functions, and the
//! closed-form trigonometric sums over block sets.

mod dirichlet;
mod periodic;
mod unit_point;

pub use dirichlet::{
    block_kernel, c_cross_term, cosine_sum_closed, dirichlet_ratio, g_block_closed, g_block_direct,
    square_decomposition, CosineSum, KernelEval, SquareDecomposition, SINGULARITY_GUARD,
};
pub use periodic::{eval_periodic, CenteredIndicator, PeriodicFunction, TrigPoly};
pub use unit_point::{frac_mul, UnitPoint};
