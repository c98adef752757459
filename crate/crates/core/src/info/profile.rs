use serde::{Deserialize, Serialize};

use super::partition::{Partition, MAX_ELEMENTS};
use super::pmf::{JointPmf, Projection};
use crate::error::{Error, Result};

/// Slack for sign checks on information values.
pub const NONNEG_SLACK: f64 = 1e-12;

/// Largest `m` for which all `2^m` subset entropies are tabulated.
pub const MAX_PROFILE_M: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoKind {
    Entropy,
    Mi,
    Multiinformation,
    PartitionInfo,
    ClusterInfo,
}

/// An information quantity in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoValue {
    pub value: f64,
    pub kind: InfoKind,
}

/// `c log2 c` for counts `0..=n`, shared by every plug-in entropy.
#[derive(Debug, Clone)]
pub struct EntropyTable {
    n: usize,
    log_n: f64,
    clogc: Vec<f64>,
}

impl EntropyTable {
    pub fn new(n: usize) -> Self {
        let clogc = (0..=n).map(|c| if c == 0 { 0.0 } else { c as f64 * (c as f64).log2() }).collect();
        EntropyTable { n, log_n: (n as f64).log2(), clogc }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Plug-in entropy of a count vector summing to `n`; summation follows iteration order.
    pub fn entropy<I: IntoIterator<Item = usize>>(&self, counts: I) -> f64 {
        let s: f64 = counts.into_iter().map(|c| self.clogc[c]).sum();
        self.log_n - s / self.n as f64
    }
}

/// Shannon entropy in bits of a pmf; `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>()
}

/// Entropies of every coordinate subset, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    m: usize,
    h: Vec<f64>,
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 || m > MAX_PROFILE_M.min(MAX_ELEMENTS) {
        return Err(Error::GuardViolation(format!("entropy profile over {m} coordinates")));
    }
    Ok(())
}

impl EntropyProfile {
    /// From distinct `(code, count)` pairs of a histogram over `dims`.
    pub fn from_counts(dims: &[usize], distinct: &[(usize, usize)], table: &EntropyTable) -> Result<Self> {
        let m = dims.len();
        check_m(m)?;
        let mut h = vec![0.0; 1 << m];
        let mut marginal: Vec<usize> = Vec::new();
        for (mask, slot) in h.iter_mut().enumerate().skip(1) {
            let proj = Projection::new(dims, mask as u32);
            marginal.clear();
            marginal.resize(proj.size, 0);
            for &(code, c) in distinct {
                marginal[proj.project(code)] += c;
            }
            *slot = table.entropy(marginal.iter().copied());
        }
        Ok(EntropyProfile { m, h })
    }

    pub fn from_pmf(pmf: &JointPmf) -> Result<Self> {
        Self::from_pmf_with(pmf, entropy_bits)
    }

    /// As [`EntropyProfile::from_pmf`] with a caller-supplied entropy functional.
    pub fn from_pmf_with(pmf: &JointPmf, entropy: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let m = pmf.m();
        check_m(m)?;
        let h = (0..1u32 << m).map(|mask| if mask == 0 { 0.0 } else { entropy(&pmf.marginal_mask(mask)) }).collect();
        Ok(EntropyProfile { m, h })
    }

    /// Directly from tabulated subset entropies (`h[0]` must be 0).
    pub fn from_table(m: usize, h: Vec<f64>) -> Result<Self> {
        check_m(m)?;
        if h.len() != 1 << m {
            return Err(Error::SizeMismatch(format!("{} subset entropies for m={m}", h.len())));
        }
        Ok(EntropyProfile { m, h })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.m) - 1) as u32
    }

    /// Entropy of the coordinates in `mask`.
    pub fn h(&self, mask: u32) -> f64 {
        self.h[mask as usize]
    }

    pub fn table(&self) -> &[f64] {
        &self.h
    }

    /// `sum_{j in mask} H(X_j)`, accumulated in increasing `j`.
    pub fn singleton_sum(&self, mask: u32) -> f64 {
        (0..self.m).filter(|&j| mask >> j & 1 == 1).fold(0.0, |acc, j| acc + self.h[1 << j])
    }

    /// Multiinformation of the coordinates in `mask`; zero for singletons.
    pub fn mi_mask(&self, mask: u32) -> f64 {
        if mask.count_ones() < 2 {
            return 0.0;
        }
        self.singleton_sum(mask) - self.h(mask)
    }

    /// Cluster information for bitmask blocks.
    pub fn cluster_info_masks(&self, blocks: &[u32]) -> f64 {
        blocks.iter().fold(0.0, |acc, &b| acc + self.mi_mask(b))
    }

    /// Partition information for bitmask blocks (at least two).
    pub fn partition_info_masks(&self, blocks: &[u32]) -> f64 {
        let s = blocks.iter().fold(0.0, |acc, &b| acc + self.h(b));
        (s - self.h(self.full_mask())) / (blocks.len() - 1) as f64
    }

    fn coords_mask(&self, coords: &[usize]) -> Result<u32> {
        let mut mask = 0u32;
        for &c in coords {
            if c >= self.m {
                return Err(Error::InvalidCoordinates(format!("coordinate {c} of {}", self.m)));
            }
            mask |= 1 << c;
        }
        Ok(mask)
    }

    fn check_partition(&self, p: &Partition) -> Result<()> {
        if p.m() != self.m {
            return Err(Error::InvalidPartition(format!("partition of {} elements for {} coordinates", p.m(), self.m)));
        }
        Ok(())
    }

    pub fn entropy(&self, coords: &[usize]) -> Result<InfoValue> {
        if coords.is_empty() {
            return Err(Error::InvalidCoordinates("empty coordinate subset".into()));
        }
        Ok(InfoValue { value: self.h(self.coords_mask(coords)?), kind: InfoKind::Entropy })
    }

    pub fn mutual_information(&self, i: usize, j: usize) -> Result<InfoValue> {
        let (a, b) = (self.coords_mask(&[i])?, self.coords_mask(&[j])?);
        let value = if i == j { self.h(a) } else { (self.h(a) + self.h(b)) - self.h(a | b) };
        Ok(InfoValue { value, kind: InfoKind::Mi })
    }

    pub fn multiinformation(&self) -> Result<InfoValue> {
        if self.m < 2 {
            return Err(Error::InvalidCoordinates("multiinformation needs at least 2 coordinates".into()));
        }
        Ok(InfoValue { value: self.mi_mask(self.full_mask()), kind: InfoKind::Multiinformation })
    }

    pub fn partition_information(&self, p: &Partition) -> Result<InfoValue> {
        self.check_partition(p)?;
        if p.len() < 2 {
            return Err(Error::InvalidPartition("partition information needs at least 2 blocks".into()));
        }
        Ok(InfoValue { value: self.partition_info_masks(&p.masks()), kind: InfoKind::PartitionInfo })
    }

    pub fn cluster_information(&self, p: &Partition) -> Result<InfoValue> {
        self.check_partition(p)?;
        Ok(InfoValue { value: self.cluster_info_masks(&p.masks()), kind: InfoKind::ClusterInfo })
    }
}
