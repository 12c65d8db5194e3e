use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::kernels::{PeriodicFunction, UnitPoint};
use crate::summation::NeumaierSum;

/// `ln ln N > 0` requires `N > e^e ~ 15.15`.
pub const MIN_RATIO_N: u64 = 16;

/// `sqrt(N ln ln N)`, defined for `N >= 16`.
pub fn lil_normalizer(n: u64) -> Option<f64> {
    (n >= MIN_RATIO_N).then(|| {
        let n = n as f64;
        (n * n.ln().ln()).sqrt()
    })
}

/// `ceil(16 * ratio^i)` for `i = 0, 1, ...`, deduplicated, up to `max`.
/// `max` itself is appended when the progression skips it.
pub fn geometric_checkpoints(ratio: f64, max: u64) -> Result<Vec<u64>> {
    if !(ratio > 1.0 && ratio.is_finite()) {
        return param(format!("checkpoint ratio must exceed 1, got {ratio}"));
    }
    let mut out: Vec<u64> = Vec::new();
    let mut i = 0;
    loop {
        let v = (MIN_RATIO_N as f64 * ratio.powi(i)).ceil();
        if v > max as f64 {
            break;
        }
        let v = v as u64;
        if out.last() != Some(&v) {
            out.push(v);
        }
        i += 1;
    }
    if max >= MIN_RATIO_N && out.last() != Some(&max) {
        out.push(max);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub partial_sum: f64,
    /// `|S_N| / sqrt(N ln ln N)`; absent below `N = 16`.
    pub ratio: Option<f64>,
    /// Largest ratio over this and all earlier checkpoints.
    pub running_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LilTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub running_sup: f64,
    pub f_norm: f64,
    /// Set when the stream ended before the last requested checkpoint.
    pub truncated: bool,
}

impl LilTrace {
    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }
}

/// Resumable accumulator for `S_N = sum_{k<=N} f(n_k x)`.
#[derive(Debug, Clone)]
pub struct TraceAccumulator {
    f: PeriodicFunction,
    x: UnitPoint,
    sum: NeumaierSum,
    count: u64,
    running_sup: f64,
    checkpoints: Vec<Checkpoint>,
}

impl TraceAccumulator {
    pub fn new(f: PeriodicFunction, x: UnitPoint) -> Self {
        Self {
            f,
            x,
            sum: NeumaierSum::new(),
            count: 0,
            running_sup: 0.0,
            checkpoints: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, n: u64) {
        self.sum.add(self.f.eval(self.x.times(n)));
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn partial_sum(&self) -> f64 {
        self.sum.value()
    }

    /// Record the current state as a checkpoint.
    pub fn checkpoint(&mut self) -> Checkpoint {
        let partial_sum = self.sum.value();
        let ratio = lil_normalizer(self.count).map(|norm| partial_sum.abs() / norm);
        if let Some(r) = ratio {
            self.running_sup = self.running_sup.max(r);
        }
        let cp = Checkpoint {
            n: self.count,
            partial_sum,
            ratio,
            running_sup: self.running_sup,
        };
        self.checkpoints.push(cp);
        cp
    }

    pub fn finish(self, truncated: bool) -> LilTrace {
        LilTrace {
            checkpoints: self.checkpoints,
            running_sup: self.running_sup,
            f_norm: self.f.l2_norm(),
            truncated,
        }
    }
}

fn check_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.first() == Some(&0) || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return param("checkpoints must be positive and strictly increasing");
    }
    Ok(())
}

/// Traces several functions over one pass of the stream.
pub fn trace_many<I>(
    fs: &[PeriodicFunction],
    stream: I,
    x: UnitPoint,
    checkpoints: &[u64],
) -> Result<Vec<LilTrace>>
where
    I: IntoIterator<Item = u64>,
{
    check_checkpoints(checkpoints)?;
    let mut accs: Vec<_> = fs
        .iter()
        .map(|f| TraceAccumulator::new(f.clone(), x))
        .collect();
    let mut next = checkpoints.iter().copied().peekable();
    let mut count = 0u64;
    if next.peek().is_some() {
        for n in stream {
            for acc in &mut accs {
                acc.push(n);
            }
            count += 1;
            if next.peek() == Some(&count) {
                next.next();
                for acc in &mut accs {
                    acc.checkpoint();
                }
                if next.peek().is_none() {
                    break;
                }
            }
        }
    }
    let truncated = next.peek().is_some();
    Ok(accs.into_iter().map(|a| a.finish(truncated)).collect())
}

/// One pass over `stream`, accumulating `f(n_k x)` with compensated
/// summation and emitting `(N, S_N, ratio)` at each checkpoint.
pub fn trace_sums<I>(
    f: &PeriodicFunction,
    stream: I,
    x: UnitPoint,
    checkpoints: &[u64],
) -> Result<LilTrace>
where
    I: IntoIterator<Item = u64>,
{
    let mut traces = trace_many(std::slice::from_ref(f), stream, x, checkpoints)?;
    Ok(traces.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{cosine_sum_closed, CenteredIndicator, TrigPoly};

    #[test]
    fn normalizer_starts_at_sixteen() {
        assert_eq!(lil_normalizer(15), None);
        let v = lil_normalizer(16).unwrap();
        assert!((v - (16.0 * 16f64.ln().ln()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn geometric_grid() {
        let cps = geometric_checkpoints(1.25, 100).unwrap();
        assert_eq!(cps, vec![16, 20, 25, 32, 40, 49, 62, 77, 96, 100]);
        assert!(geometric_checkpoints(1.0, 100).is_err());
        assert!(geometric_checkpoints(2.0, 10).unwrap().is_empty());
    }

    #[test]
    fn zero_point_is_degenerate() {
        let f: PeriodicFunction = TrigPoly::new(vec![0.5], vec![]).unwrap().into();
        let t = trace_sums(&f, 1..=1000u64, UnitPoint::ZERO, &[10, 100, 1000]).unwrap();
        assert_eq!(t.checkpoints[0].ratio, None);
        assert_eq!(t.checkpoints[2].partial_sum, 500.0);
        let r = t.checkpoints[2].ratio.unwrap();
        assert!((r - 500.0 / lil_normalizer(1000).unwrap()).abs() < 1e-12);
        assert!(!t.truncated);
    }

    #[test]
    fn integers_match_closed_form() {
        let x = UnitPoint::from_ratio(1, 7).plus(UnitPoint::from_bits(987_654_321));
        let f: PeriodicFunction = TrigPoly::cosine(1).into();
        let t = trace_sums(&f, 1..=100_000u64, x, &[100, 100_000]).unwrap();
        for cp in &t.checkpoints {
            let closed = cosine_sum_closed(cp.n, x).value;
            assert!((cp.partial_sum - closed).abs() < 1e-9);
        }
    }

    #[test]
    fn indicator_over_odds_matches_per_term() {
        let x = UnitPoint::from_ratio(5, 13);
        let ind = CenteredIndicator::new(0.0, 0.5).unwrap();
        let f: PeriodicFunction = ind.into();
        let odds = (0..).map(|k: u64| 2 * k + 1);
        let t = trace_sums(&f, odds, x, &[10_000]).unwrap();
        let direct: f64 = (0..10_000u64)
            .map(|k| ind.eval(x.times(2 * k + 1)))
            .sum();
        assert_eq!(t.checkpoints[0].partial_sum, direct);
    }

    #[test]
    fn truncation_is_flagged() {
        let f: PeriodicFunction = TrigPoly::cosine(1).into();
        let t = trace_sums(&f, 1..=50u64, UnitPoint::HALF, &[20, 40, 60]).unwrap();
        assert!(t.truncated);
        assert_eq!(t.checkpoints.len(), 2);
        assert!(trace_sums(&f, 1..=50u64, UnitPoint::HALF, &[20, 20]).is_err());
        assert!(trace_sums(&f, 1..=50u64, UnitPoint::HALF, &[0, 20]).is_err());
    }

    #[test]
    fn running_sup_is_monotone() {
        let x = UnitPoint::from_ratio(1, 3).plus(UnitPoint::from_bits(1 << 90));
        let f: PeriodicFunction = TrigPoly::cosine(1).into();
        let cps = geometric_checkpoints(1.25, 10_000).unwrap();
        let t = trace_sums(&f, (1..).map(|k: u64| k * k), x, &cps).unwrap();
        assert!(t.checkpoints.windows(2).all(|w| w[0].running_sup <= w[1].running_sup));
        assert_eq!(t.running_sup, t.last().unwrap().running_sup);
    }
}
