use serde::{Deserialize, Serialize};

use super::image::check_alphabet;
use crate::error::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidProbability { name: "alpha", value: alpha });
    }
    Ok(())
}

fn check_row(label: &str, row: &[f64]) -> Result<()> {
    if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::NotStochastic(format!("{label} has a negative or non-finite entry")));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::NotStochastic(format!("{label} sums to {s}")));
    }
    Ok(())
}

/// A discrete memoryless channel: `w[x][y] = P(y | x)` on an alphabet of size `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    r: usize,
    w: Vec<f64>,
}

impl Channel {
    pub fn explicit(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        check_alphabet(r)?;
        let mut w = Vec::with_capacity(r * r);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != r {
                return Err(Error::SizeMismatch(format!("row {x} has {} entries, expected {r}", row.len())));
            }
            check_row(&format!("row {x}"), row)?;
            w.extend_from_slice(row);
        }
        Ok(Channel { r, w })
    }

    pub fn identity(r: usize) -> Result<Self> {
        Self::uniform_flip(r, 0.0)
    }

    /// Binary symmetric channel with crossover `alpha`.
    pub fn bsc(alpha: f64) -> Result<Self> {
        Self::uniform_flip(2, alpha)
    }

    /// Keeps the symbol with probability `1 - alpha`, otherwise picks one of the
    /// `r - 1` other symbols uniformly.
    pub fn uniform_flip(r: usize, alpha: f64) -> Result<Self> {
        check_alphabet(r)?;
        check_alpha(alpha)?;
        let off = alpha / (r - 1) as f64;
        let w = (0..r * r).map(|k| if k / r == k % r { 1.0 - alpha } else { off }).collect();
        Ok(Channel { r, w })
    }

    /// The channel `x -> y -> z`: the matrix product `self * next`.
    pub fn cascade(&self, next: &Channel) -> Result<Channel> {
        if self.r != next.r {
            return Err(Error::SizeMismatch(format!("cascade of r={} and r={}", self.r, next.r)));
        }
        let r = self.r;
        let mut w = vec![0.0; r * r];
        for x in 0..r {
            for y in 0..r {
                let a = self.prob(x, y);
                for z in 0..r {
                    w[x * r + z] += a * next.prob(y, z);
                }
            }
        }
        Ok(Channel { r, w })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.w[x * self.r + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x * self.r..(x + 1) * self.r]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.r).map(|x| self.row(x).to_vec()).collect()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Channel) -> f64 {
        if self.r != other.r {
            return f64::INFINITY;
        }
        self.w.iter().zip(&other.w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Configuration form of a single-output channel; the alphabet comes from context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity,
    Bsc { alpha: f64 },
    UniformFlip { alpha: f64 },
    Explicit { matrix: Vec<Vec<f64>> },
}

impl ChannelSpec {
    pub fn build(&self, r: usize) -> Result<Channel> {
        match self {
            ChannelSpec::Identity => Channel::identity(r),
            ChannelSpec::Bsc { alpha } => {
                if r != 2 {
                    return Err(Error::SizeMismatch(format!("bsc needs a binary alphabet, got r={r}")));
                }
                Channel::bsc(*alpha)
            }
            ChannelSpec::UniformFlip { alpha } => Channel::uniform_flip(r, *alpha),
            ChannelSpec::Explicit { matrix } => {
                let c = Channel::explicit(matrix.clone())?;
                if c.r() != r {
                    return Err(Error::SizeMismatch(format!("explicit matrix is {0}x{0}, alphabet is {r}", c.r())));
                }
                Ok(c)
            }
        }
    }
}

/// A channel with `arity` jointly distributed outputs: `P(y_1, .., y_K | x)`.
///
/// Output tuples are coded as `sum_j y_j * r^j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointChannel {
    r: usize,
    arity: usize,
    probs: Vec<f64>,
}

impl JointChannel {
    /// Builds from the full conditional tensor, `probs[x * r^K + code(y)]`.
    pub fn from_tensor(r: usize, arity: usize, probs: Vec<f64>) -> Result<Self> {
        check_alphabet(r)?;
        let width = checked_pow(r, arity)?;
        if probs.len() != r * width {
            return Err(Error::SizeMismatch(format!("tensor has {} entries, expected {}", probs.len(), r * width)));
        }
        for x in 0..r {
            check_row(&format!("slice x={x}"), &probs[x * width..(x + 1) * width])?;
        }
        Ok(JointChannel { r, arity, probs })
    }

    /// Outputs conditionally independent given `x`, output `j` through `channels[j]`.
    pub fn product(channels: &[Channel]) -> Result<Self> {
        let r = common_r(channels)?;
        let arity = channels.len();
        let width = checked_pow(r, arity)?;
        let mut probs = vec![0.0; r * width];
        for x in 0..r {
            for code in 0..width {
                probs[x * width + code] = decode(code, r, arity)
                    .iter()
                    .zip(channels)
                    .map(|(&y, w)| w.prob(x, y))
                    .product();
            }
        }
        Ok(JointChannel { r, arity, probs })
    }

    /// `P(y, z | x) = W1(y | x) W2(z | y)`.
    pub fn degraded(w1: &Channel, w2: &Channel) -> Result<Self> {
        Self::markov_chain(&[w1.clone(), w2.clone()])
    }

    /// `x -> y_1 -> y_2 -> ..`, with `y_j` drawn through `links[j]` from `y_{j-1}` (`y_0 = x`).
    pub fn markov_chain(links: &[Channel]) -> Result<Self> {
        let r = common_r(links)?;
        let arity = links.len();
        let width = checked_pow(r, arity)?;
        let mut probs = vec![0.0; r * width];
        for x in 0..r {
            for code in 0..width {
                let ys = decode(code, r, arity);
                let mut prev = x;
                let mut p = 1.0;
                for (&y, w) in ys.iter().zip(links) {
                    p *= w.prob(prev, y);
                    prev = y;
                }
                probs[x * width + code] = p;
            }
        }
        Ok(JointChannel { r, arity, probs })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn width(&self) -> usize {
        self.r.pow(self.arity as u32)
    }

    /// The conditional pmf over coded output tuples for input `x`.
    pub fn slice(&self, x: usize) -> &[f64] {
        let w = self.width();
        &self.probs[x * w..(x + 1) * w]
    }

    pub fn prob(&self, x: usize, ys: &[usize]) -> f64 {
        let code = ys.iter().rev().fold(0, |acc, &y| acc * self.r + y);
        self.slice(x)[code]
    }

    /// Joint law of the outputs at `positions`, in that order.
    pub fn marginal(&self, positions: &[usize]) -> Result<JointChannel> {
        if let Some(&p) = positions.iter().find(|&&p| p >= self.arity) {
            return Err(Error::InvalidCoordinates(format!("output {p} of a {}-output channel", self.arity)));
        }
        let r = self.r;
        let k = positions.len();
        let out_width = checked_pow(r, k)?;
        let width = self.width();
        let mut probs = vec![0.0; r * out_width];
        for x in 0..r {
            for code in 0..width {
                let ys = decode(code, r, self.arity);
                let sub = positions.iter().rev().fold(0, |acc, &p| acc * r + ys[p]);
                probs[x * out_width + sub] += self.probs[x * width + code];
            }
        }
        Ok(JointChannel { r, arity: k, probs })
    }

    /// The single-output channel at `position`.
    pub fn output_channel(&self, position: usize) -> Result<Channel> {
        let m = self.marginal(&[position])?;
        Ok(Channel { r: self.r, w: m.probs })
    }
}

fn common_r(channels: &[Channel]) -> Result<usize> {
    let r = channels.first().map(Channel::r).ok_or_else(|| Error::InvalidParameter("no channels given".into()))?;
    if let Some(c) = channels.iter().find(|c| c.r() != r) {
        return Err(Error::SizeMismatch(format!("channels over r={r} and r={}", c.r())));
    }
    Ok(r)
}

fn checked_pow(r: usize, k: usize) -> Result<usize> {
    // keeps tensors below 2^24 entries
    if (k as f64) * (r as f64).log2() > 24.0 {
        return Err(Error::GuardViolation(format!("{r}^{k} output tuples")));
    }
    Ok(r.pow(k as u32))
}

fn decode(mut code: usize, r: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(code % r);
        code /= r;
    }
    out
}

/// How the images of one cluster are corrupted.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Every image through its own copy of one channel.
    Iid(Channel),
    /// A fixed joint channel; clusters use its first `|C|` outputs.
    Joint(JointChannel),
}

impl ChannelModel {
    pub fn r(&self) -> usize {
        match self {
            ChannelModel::Iid(c) => c.r(),
            ChannelModel::Joint(j) => j.r(),
        }
    }

    /// The joint channel seen by a cluster of `size` images.
    pub fn for_cluster(&self, size: usize) -> Result<JointChannel> {
        match self {
            ChannelModel::Iid(c) => JointChannel::product(&vec![c.clone(); size]),
            ChannelModel::Joint(j) => {
                if size > j.arity() {
                    return Err(Error::SizeMismatch(format!(
                        "cluster of {size} images exceeds joint channel arity {}",
                        j.arity()
                    )));
                }
                j.marginal(&(0..size).collect::<Vec<_>>())
            }
        }
    }

    /// Largest cluster the model can corrupt.
    pub fn max_cluster(&self) -> Option<usize> {
        match self {
            ChannelModel::Iid(_) => None,
            ChannelModel::Joint(j) => Some(j.arity()),
        }
    }
}

/// Configuration form of [`ChannelModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelModelSpec {
    Iid { channel: ChannelSpec },
    Product { channels: Vec<ChannelSpec> },
    MarkovChain { links: Vec<ChannelSpec> },
    Degraded { first: ChannelSpec, second: ChannelSpec },
}

impl ChannelModelSpec {
    pub fn build(&self, r: usize) -> Result<ChannelModel> {
        let many = |specs: &[ChannelSpec]| specs.iter().map(|s| s.build(r)).collect::<Result<Vec<_>>>();
        Ok(match self {
            ChannelModelSpec::Iid { channel } => ChannelModel::Iid(channel.build(r)?),
            ChannelModelSpec::Product { channels } => ChannelModel::Joint(JointChannel::product(&many(channels)?)?),
            ChannelModelSpec::MarkovChain { links } => ChannelModel::Joint(JointChannel::markov_chain(&many(links)?)?),
            ChannelModelSpec::Degraded { first, second } => {
                ChannelModel::Joint(JointChannel::degraded(&first.build(r)?, &second.build(r)?)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsc_extremes() {
        assert_eq!(Channel::bsc(0.0).unwrap(), Channel::identity(2).unwrap());
        assert!(Channel::bsc(0.5).unwrap().rows().iter().flatten().all(|&v| v == 0.5));
        assert!(Channel::bsc(1.5).is_err());
        assert!(Channel::bsc(-0.1).is_err());
    }

    #[test]
    fn uniform_flip_ternary() {
        let c = Channel::uniform_flip(3, 0.3).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let want = if x == y { 0.7 } else { 0.15 };
                assert!((c.prob(x, y) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn explicit_validation() {
        assert!(Channel::explicit(vec![vec![0.5, 0.5], vec![0.2, 0.7]]).is_err());
        assert!(Channel::explicit(vec![vec![1.5, -0.5], vec![0.0, 1.0]]).is_err());
        assert!(Channel::explicit(vec![vec![1.0, 0.0]]).is_err());
        assert!(Channel::explicit(vec![vec![0.25, 0.75], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn cascade_of_bscs() {
        let (a, b) = (0.1, 0.2);
        let c = Channel::bsc(a).unwrap().cascade(&Channel::bsc(b).unwrap()).unwrap();
        let gamma = a * (1.0 - b) + (1.0 - a) * b;
        assert!(c.max_abs_diff(&Channel::bsc(gamma).unwrap()) < 1e-15);
        let w = Channel::uniform_flip(3, 0.4).unwrap();
        assert!(Channel::identity(3).unwrap().cascade(&w).unwrap().max_abs_diff(&w) < 1e-15);
        assert!(w.cascade(&Channel::bsc(0.1).unwrap()).is_err());
    }

    #[test]
    fn cascade_point_one_twice_is_point_one_eight() {
        let c = Channel::bsc(0.1).unwrap().cascade(&Channel::bsc(0.1).unwrap()).unwrap();
        assert!((c.prob(0, 1) - 0.18).abs() < 1e-15);
        assert!((c.prob(1, 1) - 0.82).abs() < 1e-15);
    }

    #[test]
    fn product_of_identities() {
        let id = Channel::identity(2).unwrap();
        let jc = JointChannel::product(&[id.clone(), id]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let want = if y == x && z == x { 1.0 } else { 0.0 };
                    assert_eq!(jc.prob(x, &[y, z]), want);
                }
            }
        }
    }

    #[test]
    fn degraded_marginals() {
        let w1 = Channel::bsc(0.1).unwrap();
        let w2 = Channel::bsc(0.1).unwrap();
        let jc = JointChannel::degraded(&w1, &w2).unwrap();
        assert!(jc.output_channel(0).unwrap().max_abs_diff(&w1) < 1e-12);
        // summing the tensor over y by hand
        for x in 0..2 {
            for z in 0..2 {
                let s: f64 = (0..2).map(|y| jc.prob(x, &[y, z])).sum();
                let want = if x == z { 0.82 } else { 0.18 };
                assert!((s - want).abs() < 1e-12);
            }
        }
        assert!(jc.output_channel(1).unwrap().max_abs_diff(&w1.cascade(&w2).unwrap()) < 1e-12);
    }

    #[test]
    fn joint_model_truncates_to_cluster_size() {
        let bsc = Channel::bsc(0.1).unwrap();
        let model = ChannelModel::Joint(JointChannel::markov_chain(&[Channel::identity(2).unwrap(), bsc.clone()]).unwrap());
        assert_eq!(model.for_cluster(1).unwrap().arity(), 1);
        assert!(model.for_cluster(3).is_err());
        let iid = ChannelModel::Iid(bsc);
        assert_eq!(iid.for_cluster(3).unwrap().arity(), 3);
    }

    #[test]
    fn spec_parsing() {
        let s: ChannelModelSpec =
            serde_json::from_str(r#"{"kind":"degraded","first":{"kind":"bsc","alpha":0.1},"second":{"kind":"bsc","alpha":0.1}}"#)
                .unwrap();
        assert!(matches!(s.build(2).unwrap(), ChannelModel::Joint(_)));
        assert!(serde_json::from_str::<ChannelSpec>(r#"{"kind":"bsc","alpha":0.1,"beta":1}"#).is_err());
        assert!(ChannelSpec::Bsc { alpha: 0.1 }.build(3).is_err());
    }
}
