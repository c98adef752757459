//! Registration and clustering of many images through small blocks that
//! share a reference or are merged through representatives.

use serde::{Deserialize, Serialize};

use crate::clustering::{cluster_epsilon_like, cluster_k_info, cluster_thresholded, ClusteringResult, Diagnostics, ThresholdSchedule};
use crate::error::{Error, Result};
use crate::info::Partition;
use crate::model::Image;
use crate::registration::{register_mm, RegistrationResult};
use crate::search::MAX_TUPLES;
use crate::transform::{Transform, TransformGroup};

/// `l log2|Π| - n c r^(-l) l^4 (log2 r)^4 - log2(l - 1)`.
pub fn block_size_objective(l: usize, n: usize, r: usize, group_size: usize, c: f64) -> f64 {
    let lr = (r as f64).log2();
    let lf = l as f64;
    lf * (group_size as f64).log2() - n as f64 * c * (r as f64).powi(-(l as i32)) * lf.powi(4) * lr.powi(4)
        - (lf - 1.0).log2()
}

/// Largest `l` with `r^l <= n`.
pub fn max_block_size(n: usize, r: usize) -> usize {
    let mut l = 0;
    let mut p: u128 = 1;
    while p * r as u128 <= n as u128 {
        p *= r as u128;
        l += 1;
    }
    l
}

/// Minimizes [`block_size_objective`] over `2 <= l <= log n / log r`; ties go to the smaller `l`.
pub fn choose_block_size(n: usize, r: usize, group_size: usize, c: f64) -> Result<usize> {
    if r < 2 {
        return Err(Error::InvalidAlphabet(format!("r = {r}")));
    }
    let top = max_block_size(n, r);
    if top < 2 {
        return Err(Error::InvalidParameter(format!("no admissible block size: r^2 > n for n={n}, r={r}")));
    }
    let mut best = 2;
    let mut best_value = block_size_objective(2, n, r, group_size, c);
    for l in 3..=top {
        let v = block_size_objective(l, n, r, group_size, c);
        if v < best_value {
            best = l;
            best_value = v;
        }
    }
    Ok(best)
}

/// Largest `k' <= k` whose exhaustive block search `|Π|^(k'-1)` stays within the
/// tuple guard (at least 2).
pub fn feasible_block_size(k: usize, group_size: usize) -> usize {
    let mut k = k.max(2);
    while k > 2 && (group_size as f64).powi(k as i32 - 1) > MAX_TUPLES {
        k -= 1;
    }
    k
}

/// Blocks of non-reference images, each registered together with the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub k: usize,
    pub reference: usize,
    /// Non-reference members of each block, consecutive and in index order.
    pub blocks: Vec<Vec<usize>>,
}

impl BlockPlan {
    /// Reference is image `m - 1`; the others are split into groups of `k - 1`.
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m < 2 || k < 2 {
            return Err(Error::InvalidParameter(format!("block plan needs m >= 2 and k >= 2, got m={m}, k={k}")));
        }
        let others: Vec<usize> = (0..m - 1).collect();
        Ok(BlockPlan { k, reference: m - 1, blocks: others.chunks(k - 1).map(<[usize]>::to_vec).collect() })
    }
}

/// Blockwise max-multiinformation registration; estimates are in the frame of image `m - 1`.
pub fn register_blockwise(images: &[Image], group: &TransformGroup, k: usize) -> Result<RegistrationResult> {
    let m = images.len();
    let plan = BlockPlan::new(m, k)?;
    let reference = &images[plan.reference];
    let mut estimates = vec![group.identity_index(); m];
    let mut objective = Vec::new();
    let mut tie = false;
    for block in &plan.blocks {
        let mut set = Vec::with_capacity(block.len() + 1);
        set.push(reference.clone());
        set.extend(block.iter().map(|&j| images[j].clone()));
        let res = register_mm(&set, group)?;
        for (t, &j) in block.iter().enumerate() {
            estimates[j] = res.estimates[t + 1];
        }
        objective.extend(res.objective);
        tie |= res.tie;
    }
    Ok(RegistrationResult { estimates, objective, tie })
}

/// Joint algorithm run inside each block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockMethod {
    EpsilonLike { epsilon: f64 },
    KInfo { k: usize },
    Thresholded { schedule: ThresholdSchedule },
}

impl BlockMethod {
    pub fn run(&self, images: &[Image], group: &TransformGroup) -> Result<ClusteringResult> {
        match *self {
            BlockMethod::EpsilonLike { epsilon } => cluster_epsilon_like(images, group, epsilon),
            BlockMethod::KInfo { k } => cluster_k_info(images, group, k.min(images.len())),
            BlockMethod::Thresholded { schedule } => cluster_thresholded(images, group, &schedule),
        }
    }
}

/// Clusters consecutive blocks of `k` images, keeps the lowest-index image of
/// every block-level cluster as its representative, and repeats on the
/// representatives until a single block remains. Transforms are composed
/// along the representative chain, so each image is registered to the
/// lowest-index member of its final cluster.
pub fn cluster_register_blockwise(
    images: &[Image],
    group: &TransformGroup,
    k: usize,
    method: &BlockMethod,
) -> Result<ClusteringResult> {
    let m = images.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("block size {k} < 2")));
    }
    let n = images.first().map(Image::len).ok_or_else(|| Error::InvalidDims("no images".into()))?;
    let mut reps: Vec<usize> = (0..m).collect();
    let mut owner: Vec<usize> = (0..m).collect();
    let mut tau: Vec<Transform> = vec![Transform::identity(n); m];
    let mut diagnostics = Diagnostics::default();
    let mut objective = Vec::new();
    let mut tie = false;
    loop {
        let single = reps.len() <= k;
        let mut next = Vec::new();
        for block in reps.chunks(k) {
            if block.len() == 1 {
                next.push(block[0]);
                diagnostics.singletons_carried = true;
                continue;
            }
            let set: Vec<Image> = block.iter().map(|&i| images[i].clone()).collect();
            let res = method.run(&set, group)?;
            objective.push(res.diagnostics.selected_objective);
            tie |= res.registration.tie;
            diagnostics.meet_fallback |= res.diagnostics.meet_fallback;
            for cluster in res.partition.blocks() {
                let lead = block[cluster[0]];
                next.push(lead);
                if cluster.len() == 1 {
                    diagnostics.singletons_carried = true;
                }
                let back = group.get(res.registration.estimates[cluster[0]]).inverse();
                for &t in cluster {
                    let rho = block[t];
                    let sigma = group.get(res.registration.estimates[t]).compose(&back)?;
                    for j in 0..m {
                        if owner[j] == rho {
                            tau[j] = tau[j].compose(&sigma)?;
                            owner[j] = lead;
                        }
                    }
                }
            }
        }
        next.sort_unstable();
        if single {
            break;
        }
        if next.len() == reps.len() {
            diagnostics.merge_stalled = true;
            break;
        }
        reps = next;
    }
    let estimates = tau
        .iter()
        .map(|t| group.index_of(t).ok_or_else(|| Error::Internal("composed transform left the group".into())))
        .collect::<Result<Vec<_>>>()?;
    diagnostics.selected_objective = objective.last().copied().unwrap_or(0.0);
    Ok(ClusteringResult {
        partition: Partition::from_labels(&owner),
        diagnostics,
        registration: RegistrationResult { estimates, objective, tie },
    })
}
