use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{generate_n, PsiTable, SeqParams};
use crate::error::{param, Error, Result};
use crate::kernels::{PeriodicFunction, UnitPoint};
use crate::parameters::{density, solve_params, ConstantsReport, Mode};
use crate::rng::{derive_seed, random_unit_point, rng_from_seed, Domain};
use crate::statistics::{LilTrace, TraceAccumulator};

/// Stream elements one invocation may consume unless overridden.
pub const DEFAULT_MAX_ELEMENTS: u64 = 1_000_000_000;

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// How `(lambda, p)` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Lil(f64),
    Discrepancy(f64),
    Explicit { lambda: u64, p: f64 },
}

impl Target {
    pub fn resolve(&self) -> Result<ConstantsReport> {
        match *self {
            Target::Lil(t) => solve_params(t, Mode::Lil),
            Target::Discrepancy(t) => solve_params(t, Mode::Discrepancy),
            Target::Explicit { lambda, p } => {
                if lambda == 0 || !(0.0..=1.0).contains(&p) {
                    return param(format!("invalid explicit parameters lambda={lambda}, p={p}"));
                }
                Ok(ConstantsReport::new(lambda, p))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub target: Target,
    pub functions: Vec<PeriodicFunction>,
    /// Largest sequence value generated per trajectory.
    pub limit: u64,
    /// Term counts `N` at which traces are recorded.
    pub checkpoints: Vec<u64>,
    pub num_x: usize,
    pub num_seeds: usize,
    pub master_seed: u64,
    /// Evaluate every trajectory at this point instead of random ones.
    pub x: Option<UnitPoint>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub max_elements: u64,
}

impl ExperimentConfig {
    pub fn new(target: Target, functions: Vec<PeriodicFunction>, limit: u64) -> Self {
        Self {
            target,
            functions,
            limit,
            checkpoints: Vec::new(),
            num_x: 1,
            num_seeds: 1,
            master_seed: 0,
            x: None,
            threads: None,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }

    pub fn trajectories(&self) -> usize {
        self.num_x * self.num_seeds
    }

    /// Evaluation point of the `x_index`-th ensemble member.
    pub fn point(&self, x_index: usize) -> UnitPoint {
        self.x.unwrap_or_else(|| {
            let mut rng = rng_from_seed(derive_seed(
                self.master_seed,
                Domain::EvaluationPoint,
                x_index as u64,
            ));
            random_unit_point(&mut rng)
        })
    }

    /// Selection seed of the `seed_index`-th realization.
    pub fn sequence_seed(&self, seed_index: usize) -> u64 {
        derive_seed(self.master_seed, Domain::Selection, seed_index as u64)
    }

    fn validate(&self) -> Result<()> {
        if self.num_x == 0 || self.num_seeds == 0 {
            return param("num_x and num_seeds must be at least 1");
        }
        if self.functions.is_empty() {
            return param("at least one test function is required");
        }
        if self.checkpoints.first() == Some(&0) || self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return param("checkpoints must be positive and strictly increasing");
        }
        let requested = self.limit as u128 * self.trajectories() as u128;
        if requested > self.max_elements as u128 {
            return Err(Error::ResourceCap {
                requested,
                ceiling: self.max_elements,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub x_index: usize,
    pub seed_index: usize,
    /// `x` truncated to 53 bits, for display.
    pub x: f64,
    pub x_bits: String,
    pub seed: u64,
    /// `#{k : n_k <= limit}`.
    pub count: u64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub n: u64,
    /// Running-sup quantiles at [`QUANTILE_LEVELS`].
    pub running_sup: [f64; 5],
    /// Number of trajectories that reached this checkpoint.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSummary {
    pub label: String,
    pub l2_norm: f64,
    /// `Lambda * ||f||`, the almost-sure limsup the ratios approach
    /// (log-log slowly).
    pub theoretical: f64,
    pub quantiles: Vec<QuantileRow>,
    /// Ratio at the last checkpoint of every trajectory, in trajectory order.
    pub final_ratios: Vec<Option<f64>>,
    pub traces: Vec<LilTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub constants: ConstantsReport,
    pub limit: u64,
    pub checkpoints: Vec<u64>,
    pub master_seed: u64,
    pub expected_density: f64,
    pub trajectories: Vec<TrajectorySummary>,
    pub functions: Vec<FunctionSummary>,
    /// Some trajectory ran out of terms before the last checkpoint.
    pub truncated: bool,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = level.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

struct TrajectoryResult {
    summary: TrajectorySummary,
    traces: Vec<LilTrace>,
}

fn run_trajectory(
    config: &ExperimentConfig,
    constants: &ConstantsReport,
    table: &PsiTable,
    index: usize,
) -> Result<TrajectoryResult> {
    let (x_index, seed_index) = (index / config.num_seeds, index % config.num_seeds);
    let x = config.point(x_index);
    let seed = config.sequence_seed(seed_index);
    let params = SeqParams::new(constants.lambda, constants.p, seed, config.limit);

    let mut accs: Vec<_> = config
        .functions
        .iter()
        .map(|f| TraceAccumulator::new(f.clone(), x))
        .collect();
    let mut next = config.checkpoints.iter().copied().peekable();
    let mut count = 0u64;
    for n in generate_n(&params, table)? {
        count += 1;
        if next.peek().is_some() {
            for acc in &mut accs {
                acc.push(n);
            }
            if next.peek() == Some(&count) {
                next.next();
                for acc in &mut accs {
                    acc.checkpoint();
                }
            }
        }
    }
    let truncated = next.peek().is_some();
    Ok(TrajectoryResult {
        summary: TrajectorySummary {
            x_index,
            seed_index,
            x: x.to_f64(),
            x_bits: format!("{:032x}", x.bits()),
            seed,
            count,
            density: if config.limit == 0 {
                0.0
            } else {
                count as f64 / config.limit as f64
            },
        },
        traces: accs.into_iter().map(|a| a.finish(truncated)).collect(),
    })
}

/// Runs every `(x, seed)` trajectory and aggregates running-sup quantiles,
/// final ratios and density estimates.
pub fn run_lil_experiment(config: &ExperimentConfig) -> Result<McReport> {
    config.validate()?;
    let constants = config.target.resolve()?;
    let table = PsiTable::full();

    let work = || -> Result<Vec<TrajectoryResult>> {
        (0..config.trajectories())
            .into_par_iter()
            .map(|i| run_trajectory(config, &constants, &table, i))
            .collect()
    };
    let results = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let lil = constants.lil_constant;
    let truncated = results.iter().any(|r| r.traces.iter().any(|t| t.truncated));
    let functions = config
        .functions
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            let traces: Vec<LilTrace> = results.iter().map(|r| r.traces[fi].clone()).collect();
            let quantiles = config
                .checkpoints
                .iter()
                .enumerate()
                .filter_map(|(ci, &n)| {
                    let mut sups: Vec<f64> = traces
                        .iter()
                        .filter_map(|t| t.checkpoints.get(ci).map(|c| c.running_sup))
                        .collect();
                    if sups.is_empty() {
                        return None;
                    }
                    sups.sort_by(f64::total_cmp);
                    Some(QuantileRow {
                        n,
                        running_sup: QUANTILE_LEVELS.map(|q| quantile(&sups, q)),
                        samples: sups.len(),
                    })
                })
                .collect();
            let l2 = f.l2_norm();
            FunctionSummary {
                label: f.to_string(),
                l2_norm: l2,
                theoretical: lil * l2,
                quantiles,
                final_ratios: traces
                    .iter()
                    .map(|t| t.last().and_then(|c| c.ratio))
                    .collect(),
                traces,
            }
        })
        .collect();

    Ok(McReport {
        constants,
        limit: config.limit,
        checkpoints: config.checkpoints.clone(),
        master_seed: config.master_seed,
        expected_density: density(constants.lambda, constants.p),
        trajectories: results.into_iter().map(|r| r.summary).collect(),
        functions,
        truncated,
    })
}
