//! Ensembles over `(x, seed)` pairs: LIL-ratio traces, density estimates and
//! block-variance validation.
//!
//! Each trajectory is an independent task bound to its seeds before any work
//! is scheduled, and results are gathered in trajectory order, so a report
//! depends only on the configuration and master seed, never on the thread
//! count.

mod density;
mod experiment;
mod variance;

pub use density::{density_check, DensityCheck};
pub use experiment::{
    quantile, run_lil_experiment, ExperimentConfig, FunctionSummary, McReport, QuantileRow,
    Target, TrajectorySummary, DEFAULT_MAX_ELEMENTS, QUANTILE_LEVELS,
};
pub use variance::{predicted_variance, variance_validation, VarianceValidation};
