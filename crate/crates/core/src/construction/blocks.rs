use serde::{Deserialize, Serialize};

use super::psi::PsiTable;
use crate::error::{param, Result};

/// Decomposition `k = Psi(r-1) + nu*r + rho` with `0 <= nu < psi(r)` and
/// `1 <= rho <= r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockCoords {
    pub r: u32,
    pub nu: u128,
    pub rho: u32,
}

impl BlockCoords {
    /// The index this decomposition represents.
    pub fn index(&self, table: &PsiTable) -> u128 {
        table.psi_cum(self.r - 1) + self.nu * self.r as u128 + self.rho as u128
    }

    /// Smallest element of `S_k`: `lambda*Psi(r-1) + lambda*nu*r + rho`.
    pub fn first_element(&self, lambda: u64, table: &PsiTable) -> Result<u128> {
        let row = table.psi_cum(self.r - 1) + self.nu * self.r as u128;
        match row.checked_mul(lambda as u128) {
            Some(base) => Ok(base + self.rho as u128),
            None => param(format!("block elements overflow u128 for lambda = {lambda}")),
        }
    }
}

pub fn block_coords(k: u128, table: &PsiTable) -> Result<BlockCoords> {
    let r = table.level_of(k)?;
    let offset = k - table.psi_cum(r - 1) - 1;
    let level = r as u128;
    Ok(BlockCoords {
        r,
        nu: offset / level,
        rho: (offset % level) as u32 + 1,
    })
}

/// The arithmetic progression `S_k = { first + j*step : j = 0..len }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSet {
    pub first: u128,
    pub step: u32,
    pub len: u64,
}

impl BlockSet {
    pub fn iter(&self) -> impl Iterator<Item = u128> + '_ {
        let (first, step) = (self.first, self.step as u128);
        (0..self.len as u128).map(move |j| first + j * step)
    }

    pub fn last(&self) -> u128 {
        self.first + (self.len as u128 - 1) * self.step as u128
    }

    pub fn to_vec(&self) -> Vec<u128> {
        self.iter().collect()
    }
}

pub fn block_set(k: u128, lambda: u64, table: &PsiTable) -> Result<BlockSet> {
    if lambda == 0 {
        return param("lambda must be at least 1");
    }
    let coords = block_coords(k, table)?;
    let first = coords.first_element(lambda, table)?;
    Ok(BlockSet {
        first,
        step: coords.r,
        len: lambda,
    })
}

/// `#( (S_1 u ... u S_N) symmetric-difference {1, ..., lambda*N} )`.
///
/// Completed rows cover an initial segment exactly, so only the row holding
/// block `N` contributes. In that row the first `rho` interlaced progressions
/// are present and the target is the first `lambda*rho` offsets; both have
/// `lambda*rho` elements, so the difference is twice the target's shortfall.
pub fn sym_diff_count(n: u128, lambda: u64, table: &PsiTable) -> Result<u128> {
    if lambda == 0 {
        return param("lambda must be at least 1");
    }
    let coords = block_coords(n, table)?;
    let (r, rho) = (coords.r as u128, coords.rho as u128);
    let target_len = lambda as u128 * rho;
    // offsets t in 1..=target_len with ((t - 1) mod r) < rho
    let covered = (target_len / r) * rho + (target_len % r).min(rho);
    Ok(2 * (target_len - covered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_psi_table;
    use std::collections::BTreeSet;

    fn table() -> PsiTable {
        build_psi_table(6).unwrap()
    }

    #[test]
    fn coords_examples() {
        let t = table();
        let c = |r, nu, rho| BlockCoords { r, nu, rho };
        assert_eq!(block_coords(1, &t).unwrap(), c(1, 0, 1));
        assert_eq!(block_coords(5, &t).unwrap(), c(2, 1, 2));
        assert_eq!(block_coords(6, &t).unwrap(), c(3, 0, 1));
        assert!(block_coords(0, &t).is_err());
        assert!(block_coords(t.max_index() + 1, &t).is_err());
    }

    #[test]
    fn coords_reconstruct_index() {
        let t = table();
        for k in 1..=t.max_index() {
            let c = block_coords(k, &t).unwrap();
            assert_eq!(c.index(&t), k);
            assert!(c.nu < t.psi(c.r));
            assert!((1..=c.r).contains(&c.rho));
            assert!(t.psi_cum(c.r - 1) < k && k <= t.psi_cum(c.r));
        }
    }

    #[test]
    fn block_set_examples() {
        let t = table();
        assert_eq!(block_set(2, 3, &t).unwrap().to_vec(), vec![4, 6, 8]);
        assert_eq!(block_set(1, 1, &t).unwrap().to_vec(), vec![1]);
        assert_eq!(block_set(4, 3, &t).unwrap().to_vec(), vec![10, 12, 14]);
        assert!(block_set(1, 0, &t).is_err());
    }

    fn brute_sym_diff(n: u128, lambda: u64, t: &PsiTable) -> u128 {
        let union: BTreeSet<u128> = (1..=n)
            .flat_map(|k| block_set(k, lambda, t).unwrap().to_vec())
            .collect();
        let target: BTreeSet<u128> = (1..=lambda as u128 * n).collect();
        union.symmetric_difference(&target).count() as u128
    }

    #[test]
    fn sym_diff_example() {
        assert_eq!(sym_diff_count(2, 3, &table()).unwrap(), 2);
    }

    #[test]
    fn sym_diff_matches_enumeration() {
        let t = build_psi_table(4).unwrap();
        for lambda in [1, 2, 3, 5] {
            for n in 1..=t.max_index() {
                assert_eq!(
                    sym_diff_count(n, lambda, &t).unwrap(),
                    brute_sym_diff(n, lambda, &t),
                    "n = {n}, lambda = {lambda}"
                );
            }
        }
    }

    #[test]
    fn sym_diff_vanishes_on_level_boundaries() {
        let t = table();
        for lambda in [1, 2, 3, 7] {
            for r in 1..=t.max_r() {
                assert_eq!(sym_diff_count(t.psi_cum(r), lambda, &t).unwrap(), 0);
            }
        }
    }
}
