//! Randomized construction of integer sequences `n_1 < n_2 < ...` with gaps in
//! `{1, 2}` whose normalized trigonometric sums and discrepancies have a
//! prescribed iterated-logarithm constant, together with the exact kernels and
//! statistics needed to check the construction numerically.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`construction`]: the `psi` / `Psi` tables, block sets `S_k`, and the
//!   seeded streams `(m_k)` and `(n_k)`.
//! - [`kernels`]: exact fixed-point fractional parts, mean-zero periodic test
//!   functions, Dirichlet-kernel closed forms.
//! - [`parameters`]: the limsup constants and the inverse problem
//!   `Lambda -> (lambda, p)`.
//! - [`statistics`]: partial-sum traces, star / extremal / dyadic
//!   discrepancies, Koksma checks, sign sequences.
//! - [`montecarlo`]: ensembles over `(x, seed)` pairs and variance / density
//!   validation.

pub mod construction;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod parameters;
pub mod rng;
pub mod statistics;
pub mod summation;

pub use construction::{
    block_coords, block_set, build_psi_table, generate_m, generate_n, sym_diff_count, BlockCoords,
    BlockSet, MStream, NStream, PsiTable, SelectionStream, SeqParams,
};
pub use error::{Error, Result};
pub use kernels::{CenteredIndicator, PeriodicFunction, TrigPoly, UnitPoint};
pub use parameters::{solve_params, ConstantsReport, Mode};
