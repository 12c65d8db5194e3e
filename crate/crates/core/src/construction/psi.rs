use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Largest supported level. `22^22 < 2^98`, and `Psi(22)` still leaves room for
/// multiplication by any realistic block length inside `u128`.
pub const MAX_R: u32 = 22;

/// `psi(r)` and `Psi(r) = sum_{i<=r} i * psi(i)` for `r = 1..=max_r`.
///
/// `psi(r)` is the unique integer with
/// `Psi(r-1) + r*(psi(r) - 1) < r^r <= Psi(r-1) + r*psi(r)`, i.e. each level
/// `r` holds just enough blocks of `r` interlaced progressions to reach `r^r`.
/// `Psi(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiTable {
    // psi[0] is a placeholder so that psi[r] is psi(r)
    psi: Vec<u128>,
    psi_cum: Vec<u128>,
}

pub fn build_psi_table(max_r: u32) -> Result<PsiTable> {
    PsiTable::new(max_r)
}

impl PsiTable {
    pub fn new(max_r: u32) -> Result<Self> {
        if max_r == 0 || max_r > MAX_R {
            return param(format!("max_r must lie in 1..={MAX_R}, got {max_r}"));
        }
        let mut psi = vec![0u128; max_r as usize + 1];
        let mut psi_cum = vec![0u128; max_r as usize + 1];
        for r in 1..=max_r {
            let level = r as u128;
            let target = level.pow(r);
            let prev = psi_cum[r as usize - 1];
            // target > prev for every r >= 1, so this is a positive ceiling division
            let count = (target - prev).div_ceil(level);
            psi[r as usize] = count;
            psi_cum[r as usize] = prev + level * count;
        }
        Ok(Self { psi, psi_cum })
    }

    /// The full table up to [`MAX_R`].
    pub fn full() -> Self {
        Self::new(MAX_R).expect("MAX_R is in range")
    }

    pub fn max_r(&self) -> u32 {
        (self.psi.len() - 1) as u32
    }

    /// `psi(r)` for `1 <= r <= max_r`.
    pub fn psi(&self, r: u32) -> u128 {
        assert!(r >= 1 && r <= self.max_r(), "level {r} outside table");
        self.psi[r as usize]
    }

    /// `Psi(r)` for `0 <= r <= max_r`.
    pub fn psi_cum(&self, r: u32) -> u128 {
        self.psi_cum[r as usize]
    }

    /// `psi(1..=max_r)`.
    pub fn psi_values(&self) -> &[u128] {
        &self.psi[1..]
    }

    /// `Psi(0..=max_r)`.
    pub fn psi_cum_values(&self) -> &[u128] {
        &self.psi_cum
    }

    /// Largest block index covered by the table.
    pub fn max_index(&self) -> u128 {
        self.psi_cum[self.psi_cum.len() - 1]
    }

    /// Level `r` with `Psi(r-1) < k <= Psi(r)`.
    pub fn level_of(&self, k: u128) -> Result<u32> {
        if k == 0 || k > self.max_index() {
            return Err(Error::OutOfRange {
                index: k,
                max: self.max_index(),
            });
        }
        Ok(self.psi_cum.partition_point(|&c| c < k) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level() {
        let t = build_psi_table(1).unwrap();
        assert_eq!(t.psi_values(), &[1]);
        assert_eq!(t.psi_cum_values(), &[0, 1]);
    }

    #[test]
    fn first_four_levels() {
        let t = build_psi_table(4).unwrap();
        assert_eq!(t.psi_values(), &[1, 2, 8, 57]);
        assert_eq!(t.psi_cum_values(), &[0, 1, 5, 29, 257]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(build_psi_table(0), Err(Error::Parameter(_))));
        assert!(matches!(build_psi_table(23), Err(Error::Parameter(_))));
        assert!(build_psi_table(22).is_ok());
    }

    #[test]
    fn recursion_and_closeness_hold_for_full_table() {
        let t = PsiTable::full();
        for r in 1..=t.max_r() {
            let level = r as u128;
            let rr = level.pow(r);
            let cum = t.psi_cum(r);
            assert_eq!(cum, t.psi_cum(r - 1) + level * t.psi(r));
            assert!(cum - level < rr && rr <= cum, "r = {r}");
            if r >= 2 {
                // |psi(r) - (r^r - (r-1)^(r-1))/r| < 1  <=>  |r*psi(r) - diff| < r
                let diff = rr - (level - 1).pow(r - 1);
                let scaled = level * t.psi(r);
                assert!(scaled.abs_diff(diff) < level, "r = {r}");
            }
        }
    }

    #[test]
    fn level_lookup() {
        let t = build_psi_table(5).unwrap();
        assert_eq!(t.level_of(1).unwrap(), 1);
        assert_eq!(t.level_of(2).unwrap(), 2);
        assert_eq!(t.level_of(5).unwrap(), 2);
        assert_eq!(t.level_of(6).unwrap(), 3);
        assert_eq!(t.level_of(t.max_index()).unwrap(), 5);
        assert!(t.level_of(0).is_err());
        assert!(t.level_of(t.max_index() + 1).is_err());
    }
}
