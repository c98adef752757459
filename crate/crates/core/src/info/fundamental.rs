use serde::Serialize;

use super::partition::Partition;
use super::profile::EntropyProfile;
use crate::error::{Error, Result};

/// Tolerance for comparing information values, bits.
pub const INFO_TOL: f64 = 1e-9;

/// Enumeration limit for exhaustive partition searches.
pub const MAX_PARTITION_M: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalPartition {
    /// Minimum partition information over partitions with at least two blocks.
    pub mpi: f64,
    /// Finest minimizer.
    pub partition: Partition,
    /// All partitions within [`INFO_TOL`] of the minimum, in enumeration order.
    pub minimizers: Vec<Partition>,
}

pub(crate) fn check_partition_guard(m: usize) -> Result<()> {
    if m > MAX_PARTITION_M {
        return Err(Error::GuardViolation(format!("partition enumeration over m={m} exceeds m<={MAX_PARTITION_M}")));
    }
    Ok(())
}

/// Returns the element of `set` that refines every other element, if any.
pub fn finest(set: &[Partition]) -> Option<&Partition> {
    set.iter().find(|p| set.iter().all(|q| p.refines(q)))
}

/// Returns the element of `set` refined by every other element, if any.
pub fn densest(set: &[Partition]) -> Option<&Partition> {
    set.iter().find(|p| set.iter().all(|q| q.refines(p)))
}

/// Exhaustive minimum partition information and the finest minimizer.
pub fn fundamental_partition(profile: &EntropyProfile) -> Result<FundamentalPartition> {
    let m = profile.m();
    if m < 2 {
        return Err(Error::InvalidPartition("fundamental partition needs m >= 2".into()));
    }
    check_partition_guard(m)?;
    let scored: Vec<(Partition, f64)> = Partition::enumerate(m)
        .filter(|p| p.len() > 1)
        .map(|p| {
            let v = profile.partition_info_masks(&p.masks());
            (p, v)
        })
        .collect();
    let mpi = scored.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let minimizers: Vec<Partition> = scored.into_iter().filter(|(_, v)| *v <= mpi + INFO_TOL).map(|(p, _)| p).collect();
    let partition = finest(&minimizers).cloned().ok_or(Error::NoFinestMinimizer { count: minimizers.len() })?;
    Ok(FundamentalPartition { mpi, partition, minimizers })
}
