use crate::error::{Error, Result};

/// Largest joint table, in bits of index space.
pub const MAX_TABLE_BITS: f64 = 24.0;

pub(crate) fn table_size(dims: &[usize]) -> Result<usize> {
    let bits: f64 = dims.iter().map(|&d| (d as f64).log2()).sum();
    if bits > MAX_TABLE_BITS {
        return Err(Error::GuardViolation(format!("joint table over {dims:?} exceeds 2^{MAX_TABLE_BITS}")));
    }
    Ok(dims.iter().product())
}

/// An exact joint pmf over tuples `(x_0, .., x_{m-1})`, `x_j < dims[j]`,
/// stored densely with `x_0` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size = table_size(&dims)?;
        if probs.len() != size {
            return Err(Error::SizeMismatch(format!("{} probabilities for a table of {size}", probs.len())));
        }
        crate::model::check_pmf("joint pmf", &probs)?;
        Ok(JointPmf { dims, probs })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, xs: &[usize]) -> f64 {
        self.probs[encode(xs, &self.dims)]
    }

    /// Marginal over the coordinates in `mask`, coordinates kept in increasing order.
    pub fn marginal_mask(&self, mask: u32) -> Vec<f64> {
        let proj = Projection::new(&self.dims, mask);
        let mut out = vec![0.0; proj.size];
        for (code, &p) in self.probs.iter().enumerate() {
            out[proj.project(code)] += p;
        }
        out
    }

    /// Total variation distance to another pmf on the same table.
    pub fn total_variation(&self, other: &[f64]) -> f64 {
        0.5 * self.probs.iter().zip(other).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

pub(crate) fn encode(xs: &[usize], dims: &[usize]) -> usize {
    xs.iter().zip(dims).rev().fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Maps a full tuple code to the code of its restriction to `mask`.
#[derive(Debug, Clone)]
pub(crate) struct Projection {
    dims: Vec<usize>,
    keep: Vec<bool>,
    pub size: usize,
}

impl Projection {
    pub fn new(dims: &[usize], mask: u32) -> Self {
        let keep: Vec<bool> = (0..dims.len()).map(|j| mask >> j & 1 == 1).collect();
        let size = dims.iter().zip(&keep).filter(|(_, &k)| k).map(|(&d, _)| d).product();
        Projection { dims: dims.to_vec(), keep, size }
    }

    pub fn project(&self, mut code: usize) -> usize {
        let mut out = 0;
        let mut stride = 1;
        for (&d, &k) in self.dims.iter().zip(&self.keep) {
            let x = code % d;
            code /= d;
            if k {
                out += x * stride;
                stride *= d;
            }
        }
        out
    }
}
