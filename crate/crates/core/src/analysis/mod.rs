//! Monte-Carlo evaluation, exponent fits, reference bounds and exact type counting.

mod counting;
mod stats;
mod trials;

pub use counting::{
    type_class_brute_force, type_class_count, type_class_from_counts, whittle_brute_force, whittle_count, TypeClassCount,
    MAX_BRUTE_FORCE,
};
pub use stats::{exponent_slope, kailath_bound, wilson_interval, CurvePoint, ErrorCurve, SlopeFit, Z95};
pub use trials::{error_point, run_trials, score_trial, Algorithm, BlockChoice, BlockSize, Score, TrialRecord, TrialSetup};
