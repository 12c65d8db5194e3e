use serde::{Deserialize, Serialize};

use crate::construction::{generate_n, PsiTable, SeqParams};
use crate::error::{param, Result};
use crate::parameters::density;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityCheck {
    /// `#{k : n_k <= N}`.
    pub count: u64,
    /// `N (lambda + p) / (2 lambda)`.
    pub expected: f64,
    /// `(count - expected) / N`.
    pub deviation: f64,
}

pub fn density_check(params: &SeqParams, table: &PsiTable, n: u64) -> Result<DensityCheck> {
    if n == 0 || n > params.limit {
        return param(format!("N = {n} must lie in 1..={}", params.limit));
    }
    let truncated = SeqParams { limit: n, ..*params };
    let count = generate_n(&truncated, table)?.count() as u64;
    let expected = n as f64 * density(params.lambda, params.p);
    Ok(DensityCheck {
        count,
        expected,
        deviation: (count as f64 - expected) / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odds_only() {
        let t = PsiTable::full();
        for n in [1u64, 2, 9, 10, 1001] {
            let d = density_check(&SeqParams::new(2, 0.0, 4, n), &t, n).unwrap();
            assert_eq!(d.count, n.div_ceil(2));
            assert_eq!(d.expected, n as f64 / 2.0);
            assert!(d.deviation.abs() <= 1.0 / n as f64);
        }
    }

    #[test]
    fn all_integers() {
        let t = PsiTable::full();
        let d = density_check(&SeqParams::new(1, 1.0, 4, 5000), &t, 5000).unwrap();
        assert_eq!((d.count, d.expected, d.deviation), (5000, 5000.0, 0.0));
    }

    #[test]
    fn out_of_range() {
        let t = PsiTable::full();
        assert!(density_check(&SeqParams::new(1, 1.0, 4, 10), &t, 11).is_err());
        assert!(density_check(&SeqParams::new(1, 1.0, 4, 10), &t, 0).is_err());
    }
}
