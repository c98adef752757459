use serde::Serialize;

use super::channel::{Channel, ChannelModel, JointChannel};
use super::scene::{check_pmf, SceneModel};
use crate::error::{Error, Result};
use crate::info::{JointPmf, Partition};

/// Exact law of one pixel tuple across the `m` images of `partition`.
///
/// Each cluster sees its own scene pixel drawn from the prior. Images with
/// `aligned[j] == false` are treated as independent of everything else and
/// follow their marginal law.
pub fn analytic_pixel_joint(
    scenes: &SceneModel,
    partition: &Partition,
    channels: &ChannelModel,
    aligned: &[bool],
) -> Result<JointPmf> {
    let r = scenes.r();
    let m = partition.m();
    if channels.r() != r {
        return Err(Error::SizeMismatch(format!("scene alphabet {r}, channel alphabet {}", channels.r())));
    }
    if aligned.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: aligned.len() });
    }
    if (m as f64) * (r as f64).log2() > crate::info::pmf::MAX_TABLE_BITS {
        return Err(Error::GuardViolation(format!("{r}^{m} pixel tuples")));
    }

    // (image indices, table over their joint values)
    let mut factors: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for block in partition.blocks() {
        let jc = channels.for_cluster(block.len())?;
        let together: Vec<usize> = (0..block.len()).filter(|&t| aligned[block[t]]).collect();
        if !together.is_empty() {
            let sub = jc.marginal(&together)?;
            factors.push((together.iter().map(|&t| block[t]).collect(), mix(scenes.prior(), &sub)));
        }
        for t in (0..block.len()).filter(|&t| !aligned[block[t]]) {
            factors.push((vec![block[t]], mix(scenes.prior(), &jc.marginal(&[t])?)));
        }
    }

    let size = r.pow(m as u32);
    let mut probs = vec![1.0; size];
    let mut xs = vec![0usize; m];
    for (code, p) in probs.iter_mut().enumerate() {
        let mut c = code;
        for x in xs.iter_mut() {
            *x = c % r;
            c /= r;
        }
        for (members, table) in &factors {
            let local = members.iter().rev().fold(0, |acc, &j| acc * r + xs[j]);
            *p *= table[local];
        }
    }
    JointPmf::new(vec![r; m], probs)
}

/// `sum_s prior(s) * jc(y | s)` over coded outputs `y`.
fn mix(prior: &[f64], jc: &JointChannel) -> Vec<f64> {
    let width = jc.slice(0).len();
    let mut out = vec![0.0; width];
    for (s, &ps) in prior.iter().enumerate() {
        for (o, &w) in out.iter_mut().zip(jc.slice(s)) {
            *o += ps * w;
        }
    }
    out
}

/// Divergence between the conditional laws seen from two input symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelAnalysis {
    /// `sum P(x1) P(x2) D(W(.|x1) || W(.|x2))`, bits; infinite on support mismatch.
    pub delta: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub infinite: bool,
    pub below_min: bool,
    pub above_max: bool,
}

impl ChannelAnalysis {
    pub fn violated(&self) -> bool {
        self.infinite || self.below_min || self.above_max
    }
}

/// Conditional divergence of `w` with both inputs i.i.d. from `marginal`.
pub fn channel_analysis(w: &Channel, marginal: &[f64], theta_min: f64, theta_max: f64) -> Result<ChannelAnalysis> {
    if marginal.len() != w.r() {
        return Err(Error::SizeMismatch(format!("marginal over {} symbols, channel over {}", marginal.len(), w.r())));
    }
    check_pmf("marginal", marginal)?;
    let r = w.r();
    let mut delta = 0.0;
    for x1 in 0..r {
        for x2 in 0..r {
            let weight = marginal[x1] * marginal[x2];
            if weight == 0.0 {
                continue;
            }
            delta += weight * kl_bits(w.row(x1), w.row(x2));
        }
    }
    let infinite = delta.is_infinite();
    Ok(ChannelAnalysis {
        delta,
        theta_min,
        theta_max,
        infinite,
        below_min: delta < theta_min,
        above_max: !infinite && delta > theta_max,
    })
}

/// Relative entropy in bits.
pub fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| if b == 0.0 { f64::INFINITY } else { a * (a / b).log2() })
        .sum()
}

/// The conditional channel `W(y | x) = P(x, y) / P(x)` and the marginal of `x`
/// from a pair law `joint[x][y]`. Rows with `P(x) = 0` become uniform.
pub fn conditional_channel(joint: &[Vec<f64>]) -> Result<(Channel, Vec<f64>)> {
    let marginal: Vec<f64> = joint.iter().map(|row| row.iter().sum()).collect();
    let rows = joint
        .iter()
        .zip(&marginal)
        .map(|(row, &px)| {
            if px > 0.0 {
                let mut v: Vec<f64> = row.iter().map(|&p| p / px).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|p| *p /= s);
                v
            } else {
                vec![1.0 / row.len() as f64; row.len()]
            }
        })
        .collect();
    Ok((Channel::explicit(rows)?, marginal))
}

/// Analysis of the channel between outputs `a` and `b` of `jc` when its input follows `prior`.
pub fn output_pair_analysis(
    jc: &JointChannel,
    a: usize,
    b: usize,
    prior: &[f64],
    theta_min: f64,
    theta_max: f64,
) -> Result<ChannelAnalysis> {
    let pair = jc.marginal(&[a, b])?;
    let r = jc.r();
    let mut joint = vec![vec![0.0; r]; r];
    for (s, &ps) in prior.iter().enumerate() {
        for (ya, row) in joint.iter_mut().enumerate() {
            for (yb, v) in row.iter_mut().enumerate() {
                *v += ps * pair.slice(s)[ya + r * yb];
            }
        }
    }
    let (w, marginal) = conditional_channel(&joint)?;
    channel_analysis(&w, &marginal, theta_min, theta_max)
}
