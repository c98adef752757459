//! Cluster-information searches: epsilon-like, thresholded and K-info.

use std::collections::HashMap;

use super::{ClusteringResult, Diagnostics, ThresholdSchedule};
use crate::error::{Error, Result};
use crate::info::{check_partition_guard, densest, finest, CodeCounter, Partition, INFO_TOL};
use crate::model::Image;
use crate::registration::RegistrationResult;
use crate::search::{argmax_with_tie, TupleSearch};
use crate::transform::TransformGroup;

pub(crate) struct PartitionTable {
    pub parts: Vec<Partition>,
    pub masks: Vec<Vec<u32>>,
    pub index: HashMap<Partition, usize>,
}

impl PartitionTable {
    pub fn new(m: usize) -> Result<Self> {
        check_partition_guard(m)?;
        let parts: Vec<Partition> = Partition::enumerate(m).collect();
        let masks = parts.iter().map(Partition::masks).collect();
        let index = parts.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
        Ok(PartitionTable { parts, masks, index })
    }
}

fn check_images(images: &[Image]) -> Result<()> {
    if images.len() < 2 {
        return Err(Error::InvalidParameter("clustering needs at least 2 images".into()));
    }
    Ok(())
}

/// Per tuple: the finest partition whose cluster information is within
/// `slack` of the maximum. Across tuples: the densest such partition, ties
/// to the lexicographically smallest tuple.
fn cluster_by_slack(images: &[Image], group: &TransformGroup, slack: f64) -> Result<ClusteringResult> {
    check_images(images)?;
    let m = images.len();
    let table = PartitionTable::new(m)?;
    let search = TupleSearch::new(images, group)?;
    let mut counter = CodeCounter::new(search.n(), search.code_space())?;
    let mut chosen: Vec<usize> = Vec::with_capacity(search.tuple_count());
    let mut objective = Vec::with_capacity(search.tuple_count());
    let mut meet_fallback = false;
    let mut failure: Option<Error> = None;
    search.for_each(|_, codes| {
        if failure.is_some() {
            return;
        }
        let profile = match counter.profile(codes, m, search.r()) {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let ci: Vec<f64> = table.masks.iter().map(|b| profile.cluster_info_masks(b)).collect();
        let best = ci.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let candidates: Vec<Partition> = ci
            .iter()
            .zip(&table.parts)
            .filter(|(&v, _)| v >= best - slack - INFO_TOL)
            .map(|(_, p)| p.clone())
            .collect();
        let pick = match finest(&candidates) {
            Some(p) => p.clone(),
            None => {
                meet_fallback = true;
                candidates.iter().skip(1).fold(candidates[0].clone(), |acc, p| acc.meet(p).expect("same ground set"))
            }
        };
        chosen.push(table.index[&pick]);
        objective.push(best);
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let mut distinct: Vec<usize> = chosen.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let proposals: Vec<Partition> = distinct.iter().map(|&k| table.parts[k].clone()).collect();
    let top = densest(&proposals).ok_or(Error::NoDensestCandidate)?.clone();
    let top_index = table.index[&top];
    let best_tuple = chosen.iter().position(|&k| k == top_index).expect("densest comes from some tuple");
    let tie = chosen.iter().filter(|&&k| k == top_index).count() > 1;
    Ok(ClusteringResult {
        partition: top,
        diagnostics: Diagnostics {
            meet_fallback,
            distinct_candidates: distinct.len(),
            selected_objective: objective[best_tuple],
            ..Diagnostics::default()
        },
        registration: RegistrationResult { estimates: search.tuple(best_tuple), objective, tie },
    })
}

/// Epsilon-like clustering: candidates within `epsilon / 2` of the maximal
/// cluster information.
pub fn cluster_epsilon_like(images: &[Image], group: &TransformGroup, epsilon: f64) -> Result<ClusteringResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    cluster_by_slack(images, group, epsilon / 2.0)
}

/// Thresholded clustering: as epsilon-like with slack `gamma_n`.
pub fn cluster_thresholded(images: &[Image], group: &TransformGroup, schedule: &ThresholdSchedule) -> Result<ClusteringResult> {
    let n = images.first().map(Image::len).unwrap_or(0);
    cluster_by_slack(images, group, schedule.gamma(n))
}

/// Maximizes cluster information jointly over transform tuples and
/// partitions with exactly `k` blocks.
pub fn cluster_k_info(images: &[Image], group: &TransformGroup, k: usize) -> Result<ClusteringResult> {
    check_images(images)?;
    let m = images.len();
    if k == 0 || k > m {
        return Err(Error::InvalidParameter(format!("K = {k} outside 1..={m}")));
    }
    let table = PartitionTable::new(m)?;
    let eligible: Vec<usize> = (0..table.parts.len()).filter(|&i| table.parts[i].len() == k).collect();
    let search = TupleSearch::new(images, group)?;
    let mut counter = CodeCounter::new(search.n(), search.code_space())?;
    let mut objective = Vec::with_capacity(search.tuple_count());
    let mut best_part = Vec::with_capacity(search.tuple_count());
    let mut all = Vec::with_capacity(search.tuple_count() * eligible.len());
    let mut failure: Option<Error> = None;
    search.for_each(|_, codes| {
        if failure.is_some() {
            return;
        }
        match counter.profile(codes, m, search.r()) {
            Ok(profile) => {
                let scores: Vec<f64> = eligible.iter().map(|&i| profile.cluster_info_masks(&table.masks[i])).collect();
                let (b, _) = argmax_with_tie(&scores, INFO_TOL).expect("at least one eligible partition");
                objective.push(scores[b]);
                best_part.push(eligible[b]);
                all.extend(scores);
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (t, tie) = argmax_with_tie(&objective, INFO_TOL).ok_or_else(|| Error::Internal("empty search".into()))?;
    let within = all.iter().filter(|&&v| (v - objective[t]).abs() <= INFO_TOL).count();
    Ok(ClusteringResult {
        partition: table.parts[best_part[t]].clone(),
        diagnostics: Diagnostics { selected_objective: objective[t], ..Diagnostics::default() },
        registration: RegistrationResult { estimates: search.tuple(t), objective, tie: tie || within > 1 },
    })
}
