//! The block construction: `psi`/`Psi` tables, the index decomposition
//! `k = Psi(r-1) + nu*r + rho`, the interlaced block sets `S_k`, and the seeded
//! streams `(m_k)` and `(n_k)`.

mod blocks;
mod psi;
mod stream;

pub use blocks::{block_coords, block_set, sym_diff_count, BlockCoords, BlockSet};
pub use psi::{build_psi_table, PsiTable, MAX_R};
pub use stream::{generate_m, generate_n, MStream, NStream, SelectionStream, SeqParams, MAX_LIMIT};
