use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::slack::PartitionTable;
use super::{ClusteringResult, Diagnostics};
use crate::error::{Error, Result};
use crate::info::pmf::Projection;
use crate::info::{CodeCounter, Partition, INFO_TOL};
use crate::model::{ChannelModel, Image, SceneModel};
use crate::registration::RegistrationResult;
use crate::search::{argmax_with_tie, TupleSearch};
use crate::transform::TransformGroup;

/// Largest number of images and of scenes for the exact oracle.
pub const ORACLE_MAX_M: usize = 5;
pub const ORACLE_MAX_SCENES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    Ml,
    Map,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub result: ClusteringResult,
    /// Natural-log score of the selected pair (likelihood, times prior for MAP).
    pub log_score: f64,
    /// Posterior probability of the selected pair under the full model.
    pub posterior: f64,
    /// Enumerated prior probability of the selected partition.
    pub prior: f64,
    /// The closed-form prior `m!/k! * l^(-m)` for the selected partition.
    pub prior_closed_form: f64,
}

/// Prior law of the true partition, by enumerating all `l^m` scene assignments.
pub fn enumerated_prior(scenes: &SceneModel, m: usize) -> Result<HashMap<Partition, f64>> {
    let l = scenes.scene_count();
    if (m as f64) * (l as f64).log2() > 24.0 {
        return Err(Error::GuardViolation(format!("{l}^{m} scene assignments")));
    }
    let mut out: HashMap<Partition, f64> = HashMap::new();
    let mut labels = vec![0usize; m];
    for mut code in 0..l.pow(m as u32) {
        let mut p = 1.0;
        for lab in labels.iter_mut() {
            *lab = code % l;
            code /= l;
            p *= scenes.scene_pmf()[*lab];
        }
        *out.entry(Partition::from_labels(&labels)).or_insert(0.0) += p;
    }
    Ok(out)
}

/// `m! / k! * l^(-m)` for a partition with `k` blocks.
pub fn closed_form_prior(m: usize, k: usize, l: usize) -> f64 {
    let ratio: f64 = (k + 1..=m).map(|v| v as f64).product();
    ratio * (l as f64).powi(-(m as i32))
}

/// Exact likelihood (or posterior) maximization over partitions and
/// transform tuples with image 0 pinned.
pub fn cluster_map_oracle(
    images: &[Image],
    group: &TransformGroup,
    scenes: &SceneModel,
    channels: &ChannelModel,
    mode: OracleMode,
) -> Result<OracleResult> {
    let m = images.len();
    if !(2..=ORACLE_MAX_M).contains(&m) || scenes.scene_count() > ORACLE_MAX_SCENES {
        return Err(Error::GuardViolation(format!(
            "oracle needs 2 <= m <= {ORACLE_MAX_M} and at most {ORACLE_MAX_SCENES} scenes"
        )));
    }
    let r = scenes.r();
    if images[0].alphabet() != r || channels.r() != r {
        return Err(Error::SizeMismatch("images, scenes and channels must share one alphabet".into()));
    }
    let table = PartitionTable::new(m)?;
    let prior_map = enumerated_prior(scenes, m)?;
    let log_prior: Vec<f64> =
        table.parts.iter().map(|p| prior_map.get(p).copied().unwrap_or(0.0).ln()).collect();

    // log law of every block of images, over local codes
    let dims = vec![r; m];
    let mut block_law: Vec<Vec<f64>> = vec![Vec::new(); 1 << m];
    let mut projections: Vec<Option<Projection>> = vec![None; 1 << m];
    for mask in 1..(1u32 << m) {
        let jc = channels.for_cluster(mask.count_ones() as usize)?;
        let width = jc.slice(0).len();
        let mut law = vec![0.0; width];
        for (s, &ps) in scenes.prior().iter().enumerate() {
            for (o, &w) in law.iter_mut().zip(jc.slice(s)) {
                *o += ps * w;
            }
        }
        block_law[mask as usize] = law.into_iter().map(f64::ln).collect();
        projections[mask as usize] = Some(Projection::new(&dims, mask));
    }

    let search = TupleSearch::new(images, group)?;
    let mut counter = CodeCounter::new(search.n(), search.code_space())?;
    let mut objective = Vec::with_capacity(search.tuple_count());
    let mut best_part = Vec::with_capacity(search.tuple_count());
    let mut posterior_terms: Vec<f64> = Vec::with_capacity(search.tuple_count() * table.parts.len());
    let mut block_ll = vec![0.0; 1 << m];
    search.for_each(|_, codes| {
        let distinct = counter.distinct(codes);
        for mask in 1..(1usize << m) {
            let proj = projections[mask].as_ref().expect("set for every mask");
            block_ll[mask] = distinct.iter().fold(0.0, |acc, &(c, k)| acc + k as f64 * block_law[mask][proj.project(c)]);
        }
        let scores: Vec<f64> = table
            .masks
            .iter()
            .zip(&log_prior)
            .map(|(blocks, &lp)| {
                let ll = blocks.iter().fold(0.0, |acc, &b| acc + block_ll[b as usize]);
                posterior_terms.push(ll + lp);
                match mode {
                    OracleMode::Ml => ll,
                    OracleMode::Map => ll + lp,
                }
            })
            .collect();
        let (b, _) = argmax_with_tie(&scores, INFO_TOL).expect("partitions exist");
        objective.push(scores[b]);
        best_part.push(b);
    });
    if objective.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::ZeroLikelihood);
    }
    let (t, tie) = argmax_with_tie(&objective, INFO_TOL).ok_or_else(|| Error::Internal("empty search".into()))?;
    let p = best_part[t];
    let selected_posterior_term = posterior_terms[t * table.parts.len() + p];
    let max_term = posterior_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm: f64 = posterior_terms.iter().map(|&v| (v - max_term).exp()).sum();
    let posterior = (selected_posterior_term - max_term).exp() / norm;
    let partition = table.parts[p].clone();
    let k = partition.len();
    Ok(OracleResult {
        log_score: objective[t],
        posterior,
        prior: log_prior[p].exp(),
        prior_closed_form: closed_form_prior(m, k, scenes.scene_count()),
        result: ClusteringResult {
            partition,
            diagnostics: Diagnostics { selected_objective: objective[t], ..Diagnostics::default() },
            registration: RegistrationResult { estimates: search.tuple(t), objective, tie },
        },
    })
}
