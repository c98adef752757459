//! Pixel-index permutations, the commutative groups they form, and their
//! action on images.
//!
//! Convention: applying `p` to `x` yields `out[i] = x[p(i)]`, and
//! `compose(p, q)(i) = p(q(i))`. With these, applying `q` then `p` equals
//! applying `compose(q, p)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Transform {
    mapping: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Transform {
    type Error = Error;

    fn try_from(mapping: Vec<usize>) -> Result<Self> {
        Transform::new(mapping)
    }
}

impl From<Transform> for Vec<usize> {
    fn from(t: Transform) -> Self {
        t.mapping
    }
}

impl Transform {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n {
                return Err(Error::InvalidTransform(format!("index {v} out of range 0..{n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidTransform(format!("index {v} appears twice")));
            }
        }
        Ok(Transform { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Transform { mapping: (0..n).collect() }
    }

    /// Cyclic shift on a ring of `n` pixels: `i -> (i + k) mod n`.
    pub fn shift(n: usize, k: usize) -> Self {
        Transform { mapping: (0..n).map(|i| (i + k) % n).collect() }
    }

    /// Swaps `a` and `b`, fixes everything else.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::InvalidTransform(format!("transposition ({a} {b}) on n={n}")));
        }
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(a, b);
        Ok(Transform { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Transform) -> Result<Transform> {
        check_len(self.len(), other.len())?;
        Ok(Transform { mapping: other.mapping.iter().map(|&j| self.mapping[j]).collect() })
    }

    pub fn inverse(&self) -> Transform {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.mapping.iter().enumerate() {
            inv[v] = i;
        }
        Transform { mapping: inv }
    }

    /// `out[i] = values[self(i)]`.
    pub fn apply<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), values.len())?;
        Ok(self.mapping.iter().map(|&j| values[j]).collect())
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        let n = self.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        let mut identity_block = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            if self.mapping[start] == start {
                visited[start] = true;
                identity_block.push(start);
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                cycle.push(i);
                i = self.mapping[i];
            }
            cycles.push(cycle);
        }
        CycleStructure { cycles, identity_block }
    }

    /// True iff `self(i) != other(i)` for every index.
    pub fn is_non_overlapping(&self, other: &Transform) -> Result<bool> {
        check_len(self.len(), other.len())?;
        Ok(self.mapping.iter().zip(&other.mapping).all(|(a, b)| a != b))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Cycle decomposition of a permutation. Fixed points are collected in the
/// identity block rather than listed as 1-cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStructure {
    pub cycles: Vec<Vec<usize>>,
    pub identity_block: Vec<usize>,
}

impl CycleStructure {
    /// Number of non-trivial cycles.
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// A single cycle covering every index.
    pub fn is_simple(&self) -> bool {
        self.cycles.len() == 1 && self.identity_block.is_empty()
    }
}

/// Shape of a transform group, independent of the image length where possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    /// All `n` cyclic shifts of a ring.
    Ring,
    /// All 2-D cyclic translations of a `height x width` grid, `height = n / width`.
    Torus { width: usize },
    /// Shifts by multiples of `n / order`: a cyclic subgroup of the ring.
    RingSubgroup { order: usize },
    /// The trivial group.
    Identity,
}

impl GroupSpec {
    pub fn build(&self, n: usize) -> Result<TransformGroup> {
        match *self {
            GroupSpec::Ring => TransformGroup::ring(n),
            GroupSpec::Torus { width } => {
                if width == 0 || !n.is_multiple_of(width) {
                    return Err(Error::InvalidDims(format!("torus width {width} does not divide n={n}")));
                }
                TransformGroup::torus(n / width, width)
            }
            GroupSpec::RingSubgroup { order } => TransformGroup::ring_subgroup(n, order),
            GroupSpec::Identity => TransformGroup::ring_subgroup(n, 1),
        }
    }

    /// Group order for images of length `n`, without materializing the group.
    pub fn order(&self, n: usize) -> usize {
        match *self {
            GroupSpec::Ring | GroupSpec::Torus { .. } => n,
            GroupSpec::RingSubgroup { order } => order,
            GroupSpec::Identity => 1,
        }
    }
}

/// A finite set of transforms of common length, in canonical order.
///
/// Element order is construction order; every tie-break in the crate
/// resolves to the smallest index.
#[derive(Debug, Clone)]
pub struct TransformGroup {
    elements: Vec<Transform>,
    identity_index: usize,
    lookup: HashMap<Vec<usize>, usize>,
}

impl TransformGroup {
    /// Wraps an explicit element list. Only requires a common length and an
    /// identity element; the group axioms are checked by [`TransformGroup::verify`].
    pub fn from_elements(elements: Vec<Transform>) -> Result<Self> {
        let n = elements.first().map(Transform::len).ok_or_else(|| Error::InvalidDims("empty element list".into()))?;
        for e in &elements {
            check_len(n, e.len())?;
        }
        let identity_index = elements
            .iter()
            .position(Transform::is_identity)
            .ok_or_else(|| Error::InvalidDims("element list has no identity".into()))?;
        let mut lookup = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            lookup.entry(e.mapping.clone()).or_insert(i);
        }
        Ok(TransformGroup { elements, identity_index, lookup })
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDims("ring needs n >= 1".into()));
        }
        Self::from_elements((0..n).map(|k| Transform::shift(n, k)).collect())
    }

    /// Translations `(dy, dx)` of a row-major `height x width` grid, element
    /// index `dy * width + dx`.
    pub fn torus(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidDims(format!("torus dims ({height}, {width})")));
        }
        let n = height * width;
        let mut elements = Vec::with_capacity(n);
        for dy in 0..height {
            for dx in 0..width {
                let mapping = (0..n)
                    .map(|i| {
                        let (y, x) = (i / width, i % width);
                        ((y + dy) % height) * width + (x + dx) % width
                    })
                    .collect();
                elements.push(Transform { mapping });
            }
        }
        Self::from_elements(elements)
    }

    /// Shifts by `t * (n / order)` for `t in 0..order`.
    pub fn ring_subgroup(n: usize, order: usize) -> Result<Self> {
        if n == 0 || order == 0 || !n.is_multiple_of(order) {
            return Err(Error::InvalidDims(format!("subgroup order {order} must divide n={n}")));
        }
        let step = n / order;
        Self::from_elements((0..order).map(|t| Transform::shift(n, t * step)).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Length of the images the group acts on.
    pub fn n(&self) -> usize {
        self.elements[0].len()
    }

    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    pub fn elements(&self) -> &[Transform] {
        &self.elements
    }

    pub fn get(&self, index: usize) -> &Transform {
        &self.elements[index]
    }

    pub fn index_of(&self, t: &Transform) -> Option<usize> {
        self.lookup.get(&t.mapping).copied()
    }

    /// Index of `compose(a, b)`, if it is a member.
    pub fn compose_index(&self, a: usize, b: usize) -> Option<usize> {
        let c = self.elements[a].compose(&self.elements[b]).ok()?;
        self.index_of(&c)
    }

    pub fn inverse_index(&self, a: usize) -> Option<usize> {
        self.index_of(&self.elements[a].inverse())
    }

    pub fn verify(&self) -> GroupReport {
        let size = self.len();
        let mut closure = true;
        let mut commutative = true;
        for a in 0..size {
            for b in 0..size {
                let ab = self.elements[a].compose(&self.elements[b]).expect("common length");
                if self.index_of(&ab).is_none() {
                    closure = false;
                }
                let ba = self.elements[b].compose(&self.elements[a]).expect("common length");
                if ab != ba {
                    commutative = false;
                }
            }
        }
        let identities = self.elements.iter().filter(|e| e.is_identity()).count();
        let inverses = (0..size).all(|a| self.inverse_index(a).is_some());
        let distinct = self.lookup.len() == size;
        GroupReport { closure, commutative, unique_identity: identities == 1 && distinct, inverses }
    }
}

/// Outcome of checking the axioms on a [`TransformGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub closure: bool,
    pub commutative: bool,
    pub unique_identity: bool,
    pub inverses: bool,
}

impl GroupReport {
    pub fn all_pass(&self) -> bool {
        self.closure && self.commutative && self.unique_identity && self.inverses
    }
}
