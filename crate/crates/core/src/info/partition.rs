use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set handled with bitmask blocks.
pub const MAX_ELEMENTS: usize = 32;

/// A set partition of `0..m`, blocks sorted by their smallest element and
/// each block sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    m: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let m = blocks.iter().map(Vec::len).sum();
        Partition::new(m, blocks)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.blocks
    }
}

impl Partition {
    pub fn new(m: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; m];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i >= m {
                    return Err(Error::InvalidPartition(format!("element {i} outside 0..{m}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("element {i} in two blocks")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("element {i} not covered")));
        }
        Ok(Self::canonical(m, blocks))
    }

    fn canonical(m: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { m, blocks }
    }

    /// Block `labels[i]` holds element `i`; label values are arbitrary.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot: std::collections::HashMap<usize, usize> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            let k = *slot.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[k].push(i);
        }
        Self::canonical(labels.len(), blocks)
    }

    pub fn singletons(m: usize) -> Self {
        Partition { m, blocks: (0..m).map(|i| vec![i]).collect() }
    }

    pub fn single_block(m: usize) -> Self {
        Partition { m, blocks: if m == 0 { vec![] } else { vec![(0..m).collect()] } }
    }

    pub fn from_masks(m: usize, masks: &[u32]) -> Self {
        let blocks = masks.iter().map(|&mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect()).collect();
        Self::canonical(m, blocks)
    }

    /// Number of elements.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Canonical block index of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.m];
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                labels[i] = k;
            }
        }
        labels
    }

    pub fn masks(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.iter().fold(0u32, |acc, &i| acc | 1 << i)).collect()
    }

    /// `self` is finer than or equal to `other`: every block of `self` lies in a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.m != other.m {
            return false;
        }
        let theirs = other.labels();
        self.blocks.iter().all(|b| b.iter().all(|&i| theirs[i] == theirs[b[0]]))
    }

    pub fn strictly_refines(&self, other: &Partition) -> bool {
        self.refines(other) && self != other
    }

    /// Coarsest common refinement.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.m != other.m {
            return Err(Error::InvalidPartition(format!("meet of partitions on {} and {} elements", self.m, other.m)));
        }
        let (a, b) = (self.labels(), other.labels());
        let keyed: Vec<usize> = (0..self.m).map(|i| a[i] * self.m + b[i]).collect();
        Ok(Partition::from_labels(&keyed))
    }

    /// All partitions of `0..m`, in lexicographic order of restricted-growth strings.
    pub fn enumerate(m: usize) -> PartitionIter {
        PartitionIter { rgs: vec![0; m], max: vec![0; m], done: m == 0 }
    }

    /// Partitions of `0..m` with exactly two blocks.
    pub fn two_block(m: usize) -> impl Iterator<Item = Partition> {
        Self::enumerate(m).filter(|p| p.len() == 2)
    }

    /// Restricts to the elements of `subset` (relabelled `0..subset.len()`)
    /// and maps the result back. Used to lift splits of one block.
    pub fn lift(local: &Partition, subset: &[usize]) -> Vec<Vec<usize>> {
        local.blocks.iter().map(|b| b.iter().map(|&i| subset[i]).collect()).collect()
    }

    /// Replaces block `index` by `parts` (which must partition it).
    pub fn split_block(&self, index: usize, parts: Vec<Vec<usize>>) -> Result<Partition> {
        let mut blocks = self.blocks.clone();
        blocks.remove(index);
        blocks.extend(parts);
        Partition::new(self.m, blocks)
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (t, i) in b.iter().enumerate() {
                if t > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Lazy restricted-growth-string enumeration.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    rgs: Vec<usize>,
    // max[i] = max(rgs[0..i])
    max: Vec<usize>,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition::from_labels(&self.rgs);
        let m = self.rgs.len();
        let mut i = m;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.rgs[i] <= self.max[i] {
                self.rgs[i] += 1;
                for j in i + 1..m {
                    self.rgs[j] = 0;
                    self.max[j] = self.max[j - 1].max(self.rgs[j - 1]);
                }
                break;
            }
        }
        Some(out)
    }
}

/// Bell numbers, for guard messages and tests.
pub fn bell(m: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..m {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}
