//! Registration estimators: pairwise MMI, joint max-multiinformation, the
//! likelihood oracle and sequential registration along a degraded chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{CodeCounter, EntropyTable, INFO_TOL};
use crate::model::{common_shape, Image, JointChannel};
use crate::search::{argmax_with_tie, TupleSearch};
use crate::transform::TransformGroup;

/// Estimated group index per image; the reference (image 0) is the identity.
///
/// `objective` lists the objective of every candidate tuple in lexicographic
/// order; `estimates[j]` is the transform that registers image `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistrationResult {
    pub estimates: Vec<usize>,
    pub objective: Vec<f64>,
    pub tie: bool,
}

/// Marginal entropy of each image; invariant under every transform.
pub(crate) fn marginal_entropies(images: &[Image], table: &EntropyTable) -> Vec<f64> {
    images
        .iter()
        .map(|im| {
            let mut counts = vec![0usize; im.alphabet()];
            for &x in im.pixels() {
                counts[x as usize] += 1;
            }
            table.entropy(counts)
        })
        .collect()
}

/// Max-multiinformation registration over `Π^{m-1}` with image 0 pinned.
pub fn register_mm(images: &[Image], group: &TransformGroup) -> Result<RegistrationResult> {
    if images.len() < 2 {
        return Err(Error::InvalidParameter("registration needs at least 2 images".into()));
    }
    let search = TupleSearch::new(images, group)?;
    let mut counter = CodeCounter::new(search.n(), search.code_space())?;
    let singles = marginal_entropies(images, counter.table()).into_iter().fold(0.0, |acc, h| acc + h);
    let mut objective = Vec::with_capacity(search.tuple_count());
    search.for_each(|_, codes| objective.push(singles - counter.entropy(codes)));
    finish(&search, objective)
}

fn finish(search: &TupleSearch, objective: Vec<f64>) -> Result<RegistrationResult> {
    let (best, tie) = argmax_with_tie(&objective, INFO_TOL).ok_or_else(|| Error::Internal("empty search".into()))?;
    Ok(RegistrationResult { estimates: search.tuple(best), objective, tie })
}

/// Maximum mutual information: the transform of `y` maximizing `I(X; Y_π)`.
pub fn register_mmi_pair(x: &Image, y: &Image, group: &TransformGroup) -> Result<RegistrationResult> {
    register_mm(&[x.clone(), y.clone()], group)
}

/// Mutual information and joint entropy of `(x, apply(g, y))` for every group element `g`.
pub fn mmi_objectives(x: &Image, y: &Image, group: &TransformGroup) -> Result<(Vec<f64>, Vec<f64>)> {
    let images = [x.clone(), y.clone()];
    let search = TupleSearch::new(&images, group)?;
    let mut counter = CodeCounter::new(search.n(), search.code_space())?;
    let h = marginal_entropies(&images, counter.table());
    let singles = h[0] + h[1];
    let mut mi = Vec::with_capacity(group.len());
    let mut joint = Vec::with_capacity(group.len());
    search.for_each(|_, codes| {
        let hj = counter.entropy(codes);
        joint.push(hj);
        mi.push(singles - hj);
    });
    Ok((mi, joint))
}

/// Likelihood registration with image 0 as the channel input and images
/// `1..m` as the outputs of `jc` (arity `m - 1`).
pub fn register_ml_oracle(images: &[Image], group: &TransformGroup, jc: &JointChannel) -> Result<RegistrationResult> {
    let m = images.len();
    if m < 2 {
        return Err(Error::InvalidParameter("registration needs at least 2 images".into()));
    }
    let (_, r) = common_shape(images)?;
    if jc.arity() != m - 1 || jc.r() != r {
        return Err(Error::SizeMismatch(format!(
            "joint channel with {} outputs over r={} for {} images over r={r}",
            jc.arity(),
            jc.r(),
            m
        )));
    }
    let search = TupleSearch::new(images, group)?;
    let mut counter = CodeCounter::new(search.n(), search.code_space())?;
    // code = x0 + r * (outputs code)
    let log_w: Vec<f64> = (0..search.code_space()).map(|c| jc.slice(c % r)[c / r].ln()).collect();
    let mut objective = Vec::with_capacity(search.tuple_count());
    search.for_each(|_, codes| {
        let ll = counter.distinct(codes).iter().fold(0.0, |acc, &(c, k)| acc + k as f64 * log_w[c]);
        objective.push(ll);
    });
    if objective.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::ZeroLikelihood);
    }
    finish(&search, objective)
}

/// Registers `y` to `x` by MMI, then `z` to the registered `y` by MMI.
/// Estimates are in the frame of `x`; the objective trace is the two
/// stages concatenated.
pub fn register_sequential_degraded(x: &Image, y: &Image, z: &Image, group: &TransformGroup) -> Result<RegistrationResult> {
    let first = register_mmi_pair(x, y, group)?;
    let py = first.estimates[1];
    let y_aligned = y.transformed(group.get(py))?;
    let second = register_mmi_pair(&y_aligned, z, group)?;
    let pz = second.estimates[1];
    let mut objective = first.objective;
    objective.extend(second.objective);
    Ok(RegistrationResult { estimates: vec![group.identity_index(), py, pz], objective, tie: first.tie || second.tie })
}
