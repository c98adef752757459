//! Joint clustering and registration.

mod hierarchical;
mod oracle;
mod slack;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{check_partition_guard, EntropyProfile, Partition};
use crate::registration::RegistrationResult;

pub use hierarchical::{cluster_hierarchical, Dendrogram};
pub use oracle::{closed_form_prior, cluster_map_oracle, enumerated_prior, OracleMode, OracleResult, ORACLE_MAX_M, ORACLE_MAX_SCENES};
pub use slack::{cluster_epsilon_like, cluster_k_info, cluster_thresholded};

/// A partition of the images and one registering transform per image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub partition: Partition,
    pub registration: RegistrationResult,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Some tuple's candidate set had no finest element; its meet was used.
    pub meet_fallback: bool,
    /// Number of distinct partitions proposed across tuples.
    pub distinct_candidates: usize,
    /// Objective of the selected pair, bits.
    pub selected_objective: f64,
    /// Blockwise merging stopped before reaching a single block.
    pub merge_stalled: bool,
    /// Blockwise merging carried singleton clusters to a higher level.
    pub singletons_carried: bool,
}

/// Threshold `gamma_n = c1 * n^(-alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct ThresholdSchedule {
    c1: f64,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    c1: f64,
    alpha: f64,
}

impl TryFrom<RawSchedule> for ThresholdSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        ThresholdSchedule::new(raw.c1, raw.alpha)
    }
}

impl From<ThresholdSchedule> for RawSchedule {
    fn from(s: ThresholdSchedule) -> Self {
        RawSchedule { c1: s.c1, alpha: s.alpha }
    }
}

impl Default for ThresholdSchedule {
    fn default() -> Self {
        ThresholdSchedule { c1: 1.0, alpha: 0.2 }
    }
}

impl ThresholdSchedule {
    pub fn new(c1: f64, alpha: f64) -> Result<Self> {
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::InvalidParameter(format!("c1 = {c1} must be positive")));
        }
        if !(alpha > 0.0 && alpha < 0.25) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1/4)")));
        }
        Ok(ThresholdSchedule { c1, alpha })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self, n: usize) -> f64 {
        self.c1 * (n as f64).powf(-self.alpha)
    }
}

/// Likeness gap of `truth` under `profile`: its cluster information minus the
/// largest cluster information of any partition incomparable with it.
/// `None` when every partition is comparable with `truth`.
pub fn likeness_gap(profile: &EntropyProfile, truth: &Partition) -> Result<Option<f64>> {
    let m = profile.m();
    if truth.m() != m {
        return Err(Error::LengthMismatch { expected: m, got: truth.m() });
    }
    check_partition_guard(m)?;
    let top = profile.cluster_info_masks(&truth.masks());
    Ok(Partition::enumerate(m)
        .filter(|p| !p.refines(truth) && !truth.refines(p))
        .map(|p| top - profile.cluster_info_masks(&p.masks()))
        .reduce(f64::min))
}
