//! Seeded Monte-Carlo trials and their scoring.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::CurvePoint;
use crate::blockwise::{choose_block_size, cluster_register_blockwise, feasible_block_size, register_blockwise, BlockMethod};
use crate::clustering::{
    cluster_epsilon_like, cluster_hierarchical, cluster_k_info, cluster_map_oracle, cluster_thresholded, OracleMode,
    ThresholdSchedule, ORACLE_MAX_M, ORACLE_MAX_SCENES,
};
use crate::error::{Error, Result};
use crate::info::{check_partition_guard, Partition};
use crate::model::{generate_ensemble, ChannelModel, ChannelModelSpec, Ensemble, SceneModel};
use crate::registration::{register_ml_oracle, register_mm, register_mmi_pair, register_sequential_degraded};
use crate::search::check_search_guard;
use crate::seed::trial_seed;
use crate::transform::{GroupSpec, TransformGroup};

/// How the block size of the blockwise algorithms is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockSize {
    Fixed { k: usize },
    /// From the block-size objective with constant `c`, then clamped to the search guard.
    Auto { c: f64 },
}

/// Block size selected by the objective and the one actually used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockChoice {
    pub chosen: usize,
    pub used: usize,
}

impl BlockSize {
    pub fn resolve(&self, n: usize, r: usize, order: usize) -> Result<BlockChoice> {
        match *self {
            BlockSize::Fixed { k } => Ok(BlockChoice { chosen: k, used: k }),
            BlockSize::Auto { c } => {
                if !(c > 0.0) {
                    return Err(Error::InvalidParameter(format!("block constant c = {c} must be positive")));
                }
                let chosen = choose_block_size(n, r, order, c)?;
                Ok(BlockChoice { chosen, used: feasible_block_size(chosen, order) })
            }
        }
    }
}

/// Estimator evaluated by [`run_trials`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Algorithm {
    /// Every image registered to image 0 by pairwise MMI.
    MmiPairwise,
    Mm,
    /// Likelihood oracle; `channels` gives the law of images `1..m` given image 0.
    MlOracle { channels: ChannelModelSpec },
    /// Three images along a degraded chain.
    SequentialDegraded,
    Blockwise { block: BlockSize },
    EpsilonLike { epsilon: f64 },
    KInfo { k: usize },
    Thresholded {
        #[serde(default)]
        schedule: ThresholdSchedule,
    },
    /// Scores the dendrogram level with `k` blocks.
    Hierarchical { k: usize },
    MapOracle { mode: OracleMode },
    BlockwiseClustering { block: BlockSize, method: BlockMethod },
}

/// Which success event a curve counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Score {
    /// Partition and every transform exactly right.
    Strict,
    /// Partition right and transforms right up to one transform per true cluster.
    UpToShift,
    Partition,
    /// Transform of one image exactly right.
    Image { index: usize },
}

impl Algorithm {
    /// Registration-only estimators always return the single-block partition.
    pub fn is_registration_only(&self) -> bool {
        matches!(
            self,
            Algorithm::MmiPairwise
                | Algorithm::Mm
                | Algorithm::MlOracle { .. }
                | Algorithm::SequentialDegraded
                | Algorithm::Blockwise { .. }
        )
    }

    /// Blockwise runs register to the last image, so they are scored up to shift.
    pub fn default_score(&self) -> Score {
        match self {
            Algorithm::Blockwise { .. } | Algorithm::BlockwiseClustering { .. } => Score::UpToShift,
            _ => Score::Strict,
        }
    }

    /// Guard and parameter checks that do not need any images.
    pub fn validate(&self, setup: &TrialSetup) -> Result<()> {
        let (m, n, r) = (setup.m, setup.n, setup.scenes.r());
        let order = setup.group.order(n);
        if m < 2 {
            return Err(Error::InvalidParameter(format!("m = {m}: every algorithm needs at least 2 images")));
        }
        match self {
            Algorithm::MmiPairwise => check_search_guard(order, 2, r),
            Algorithm::Mm | Algorithm::MlOracle { .. } => check_search_guard(order, m, r),
            Algorithm::SequentialDegraded => {
                if m != 3 {
                    return Err(Error::InvalidParameter(format!("sequential_degraded needs m = 3, got {m}")));
                }
                check_search_guard(order, 2, r)
            }
            Algorithm::Blockwise { block } => {
                let k = block.resolve(n, r, order)?.used;
                if k < 2 {
                    return Err(Error::InvalidParameter(format!("block size {k} < 2")));
                }
                check_search_guard(order, k.min(m), r)
            }
            Algorithm::EpsilonLike { epsilon } => {
                if !(*epsilon > 0.0) {
                    return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
                }
                check_partition_guard(m)?;
                check_search_guard(order, m, r)
            }
            Algorithm::Thresholded { .. } => {
                check_partition_guard(m)?;
                check_search_guard(order, m, r)
            }
            Algorithm::KInfo { k } | Algorithm::Hierarchical { k } => {
                if *k == 0 || *k > m {
                    return Err(Error::InvalidParameter(format!("K = {k} outside 1..={m}")));
                }
                check_partition_guard(m)?;
                check_search_guard(order, m, r)
            }
            Algorithm::MapOracle { .. } => {
                if m > ORACLE_MAX_M || setup.scenes.scene_count() > ORACLE_MAX_SCENES {
                    return Err(Error::GuardViolation(format!(
                        "map_oracle needs m <= {ORACLE_MAX_M} and at most {ORACLE_MAX_SCENES} scenes"
                    )));
                }
                check_search_guard(order, m, r)
            }
            Algorithm::BlockwiseClustering { block, method } => {
                let k = block.resolve(n, r, order)?.used;
                if k < 2 {
                    return Err(Error::InvalidParameter(format!("block size {k} < 2")));
                }
                if let BlockMethod::EpsilonLike { epsilon } = method {
                    if !(*epsilon > 0.0) {
                        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
                    }
                }
                if let BlockMethod::KInfo { k: kk } = method {
                    if *kk == 0 {
                        return Err(Error::InvalidParameter("K = 0".into()));
                    }
                }
                check_partition_guard(k.min(m))?;
                check_search_guard(order, k.min(m), r)
            }
        }
    }

    /// Runs the estimator; returns the partition and one group index per image.
    pub fn estimate(&self, ensemble: &Ensemble, group: &TransformGroup, setup: &TrialSetup) -> Result<(Partition, Vec<usize>)> {
        let images = &ensemble.images;
        let m = images.len();
        let single = |estimates: Vec<usize>| Ok((Partition::single_block(m), estimates));
        match self {
            Algorithm::MmiPairwise => {
                let mut est = vec![group.identity_index(); m];
                for j in 1..m {
                    est[j] = register_mmi_pair(&images[0], &images[j], group)?.estimates[1];
                }
                single(est)
            }
            Algorithm::Mm => single(register_mm(images, group)?.estimates),
            Algorithm::MlOracle { channels } => {
                let jc = channels.build(ensemble.alphabet)?.for_cluster(m - 1)?;
                single(register_ml_oracle(images, group, &jc)?.estimates)
            }
            Algorithm::SequentialDegraded => {
                single(register_sequential_degraded(&images[0], &images[1], &images[2], group)?.estimates)
            }
            Algorithm::Blockwise { block } => {
                let k = block.resolve(setup.n, ensemble.alphabet, group.len())?.used;
                single(register_blockwise(images, group, k)?.estimates)
            }
            Algorithm::EpsilonLike { epsilon } => {
                let r = cluster_epsilon_like(images, group, *epsilon)?;
                Ok((r.partition, r.registration.estimates))
            }
            Algorithm::KInfo { k } => {
                let r = cluster_k_info(images, group, *k)?;
                Ok((r.partition, r.registration.estimates))
            }
            Algorithm::Thresholded { schedule } => {
                let r = cluster_thresholded(images, group, schedule)?;
                Ok((r.partition, r.registration.estimates))
            }
            Algorithm::Hierarchical { k } => {
                let d = cluster_hierarchical(images, group)?;
                let level = d.level(*k).ok_or_else(|| Error::InvalidParameter(format!("no level with {k} blocks")))?;
                Ok((level.clone(), d.registration.estimates))
            }
            Algorithm::MapOracle { mode } => {
                let r = cluster_map_oracle(images, group, &setup.scenes, &setup.channels, *mode)?;
                Ok((r.result.partition, r.result.registration.estimates))
            }
            Algorithm::BlockwiseClustering { block, method } => {
                let k = block.resolve(setup.n, ensemble.alphabet, group.len())?.used;
                let r = cluster_register_blockwise(images, group, k, method)?;
                Ok((r.partition, r.registration.estimates))
            }
        }
    }
}

/// Everything that defines the law of one trial's ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub scenes: SceneModel,
    pub channels: ChannelModel,
    pub group: GroupSpec,
    pub m: usize,
    pub n: usize,
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub config_digest: String,
    pub partition_correct: bool,
    /// Every estimate is the inverse of the true transform.
    pub transforms_correct_strict: bool,
    /// Within each true cluster all images land in one common frame.
    pub transforms_correct_up_to_cluster_shift: bool,
    pub per_image_strict: Vec<bool>,
    pub scene_collision: bool,
    /// Set when the estimator failed; the trial then counts as an error.
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl TrialRecord {
    pub fn success(&self, score: Score) -> bool {
        match score {
            Score::Strict => self.partition_correct && self.transforms_correct_strict,
            Score::UpToShift => self.partition_correct && self.transforms_correct_up_to_cluster_shift,
            Score::Partition => self.partition_correct,
            Score::Image { index } => self.per_image_strict.get(index).copied().unwrap_or(false),
        }
    }
}

/// Compares estimates with the truth of `ensemble`: partition match,
/// up-to-shift match and per-image exact match.
pub fn score_trial(ensemble: &Ensemble, group: &TransformGroup, partition: &Partition, estimates: &[usize]) -> Result<(bool, bool, Vec<bool>)> {
    let truth = &ensemble.truth;
    let m = truth.transforms.len();
    if estimates.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: estimates.len() });
    }
    // image j lands in frame compose(pi_j, est_j) of its scene
    let frames = (0..m)
        .map(|j| truth.transforms[j].compose(group.get(estimates[j])))
        .collect::<Result<Vec<_>>>()?;
    let per_image: Vec<bool> = frames.iter().map(|f| f.is_identity()).collect();
    let shift = truth.partition.blocks().iter().all(|b| b.iter().all(|&j| frames[j] == frames[b[0]]));
    Ok((partition == &truth.partition, shift, per_image))
}

/// Runs `trials` seeded trials; records are in trial order whatever the thread schedule.
pub fn run_trials(
    setup: &TrialSetup,
    algorithm: &Algorithm,
    trials: usize,
    master_seed: u64,
    config_digest: &str,
) -> Result<Vec<TrialRecord>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    algorithm.validate(setup)?;
    let group = setup.group.build(setup.n)?;
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|i| run_one(setup, &group, algorithm, i, trial_seed(master_seed, i), config_digest))
        .collect())
}

fn run_one(setup: &TrialSetup, group: &TransformGroup, algorithm: &Algorithm, trial: u64, seed: u64, digest: &str) -> TrialRecord {
    let start = Instant::now();
    let mut record = TrialRecord {
        trial,
        seed,
        config_digest: digest.to_string(),
        partition_correct: false,
        transforms_correct_strict: false,
        transforms_correct_up_to_cluster_shift: false,
        per_image_strict: vec![false; setup.m],
        scene_collision: false,
        error: None,
        wall_time: Duration::ZERO,
    };
    let outcome = generate_ensemble(&setup.scenes, &setup.channels, group, setup.m, setup.n, seed).and_then(|e| {
        record.scene_collision = e.truth.scene_collision;
        let (partition, estimates) = algorithm.estimate(&e, group, setup)?;
        score_trial(&e, group, &partition, &estimates)
    });
    match outcome {
        Ok((partition, shift, per_image)) => {
            record.partition_correct = partition;
            record.transforms_correct_strict = per_image.iter().all(|&b| b);
            record.transforms_correct_up_to_cluster_shift = shift;
            record.per_image_strict = per_image;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record.wall_time = start.elapsed();
    record
}

/// Error rate of `records` under `score`, with its Wilson interval.
pub fn error_point(x: usize, records: &[TrialRecord], score: Score) -> CurvePoint {
    let errors = records.iter().filter(|r| !r.success(score)).count();
    CurvePoint::new(x, errors, records.len())
}
