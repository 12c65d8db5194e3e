use crate::construction::{generate_n, PsiTable, SeqParams};
use crate::error::{param, Result};

/// `a_k = +1` when `k` is a term of `(n_j)`, else `-1`, for `k = 1..=n`.
///
/// Since `sum a_k e(kx) = 2 sum_{n_j <= N} e(n_j x) - sum_{k <= N} e(kx)` and
/// the last sum is bounded for almost every `x`, these signs inherit the
/// limsup behaviour of the sequence.
pub fn littlewood_signs(params: &SeqParams, table: &PsiTable, n: u64) -> Result<Vec<i8>> {
    if n > params.limit {
        return param(format!("N = {n} exceeds the stream limit {}", params.limit));
    }
    let Ok(len) = usize::try_from(n) else {
        return param(format!("N = {n} does not fit in memory"));
    };
    let mut signs = vec![-1i8; len];
    let truncated = SeqParams { limit: n, ..*params };
    for v in generate_n(&truncated, table)? {
        signs[v as usize - 1] = 1;
    }
    Ok(signs)
}
