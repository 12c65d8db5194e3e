//! Partial-sum traces, discrepancies and related diagnostics.

mod discrepancy;
mod signs;
mod trace;

pub use discrepancy::{
    disc_report, dyadic_discrepancies, extremal_discrepancy, koksma_check, star_discrepancy,
    DiscReport, DyadicDiscrepancies, KoksmaCheck, MAX_DYADIC_LEVEL,
};
pub use signs::littlewood_signs;
pub use trace::{
    geometric_checkpoints, lil_normalizer, trace_many, trace_sums, Checkpoint, LilTrace,
    TraceAccumulator, MIN_RATIO_N,
};
