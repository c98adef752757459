//! Exhaustive enumeration of transform tuples with the first image pinned.

use crate::error::{Error, Result};
use crate::model::{common_shape, Image};
use crate::transform::TransformGroup;

/// Largest number of transform tuples visited by one search.
pub const MAX_TUPLES: f64 = 1e6;

/// Largest joint code space, in bits.
const MAX_CODE_BITS: f64 = 26.0;

/// Precomputed aligned images for enumerating `Π^{m-1}`.
///
/// Tuples are full-length group-index vectors with entry 0 fixed to the
/// identity; the rest run lexicographically, last coordinate fastest.
#[derive(Debug, Clone)]
pub struct TupleSearch {
    n: usize,
    r: usize,
    m: usize,
    order: usize,
    identity: usize,
    reference: Vec<u8>,
    // aligned[j - 1][g] = apply(g, x_j)
    aligned: Vec<Vec<Vec<u8>>>,
}

pub(crate) fn check_tuple_guard(order: usize, free: usize) -> Result<()> {
    let count = (order as f64).powi(free as i32);
    if count > MAX_TUPLES {
        return Err(Error::GuardViolation(format!("|Π|^{free} = {order}^{free} transform tuples exceeds {MAX_TUPLES}")));
    }
    Ok(())
}

/// Tuple-count and code-space guards for an exhaustive search over `m` images.
pub(crate) fn check_search_guard(order: usize, m: usize, r: usize) -> Result<()> {
    check_tuple_guard(order, m.saturating_sub(1))?;
    if m as f64 * (r as f64).log2() > MAX_CODE_BITS {
        return Err(Error::GuardViolation(format!("{r}^{m} joint pixel codes")));
    }
    Ok(())
}

impl TupleSearch {
    pub fn new(images: &[Image], group: &TransformGroup) -> Result<Self> {
        let (n, r) = common_shape(images)?;
        let m = images.len();
        if group.n() != n {
            return Err(Error::LengthMismatch { expected: n, got: group.n() });
        }
        check_search_guard(group.len(), m, r)?;
        let aligned = images[1..]
            .iter()
            .map(|im| group.elements().iter().map(|g| g.apply(im.pixels())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(TupleSearch {
            n,
            r,
            m,
            order: group.len(),
            identity: group.identity_index(),
            reference: images[0].pixels().to_vec(),
            aligned,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn code_space(&self) -> usize {
        self.r.pow(self.m as u32)
    }

    pub fn tuple_count(&self) -> usize {
        self.order.pow((self.m - 1) as u32)
    }

    /// The tuple at lexicographic position `index`.
    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![self.identity; self.m];
        for j in (1..self.m).rev() {
            t[j] = index % self.order;
            index /= self.order;
        }
        t
    }

    /// Pixels of image `j` under group element `g` (image 0 only under the identity).
    pub fn aligned(&self, j: usize, g: usize) -> &[u8] {
        if j == 0 {
            &self.reference
        } else {
            &self.aligned[j - 1][g]
        }
    }

    /// Calls `f(tuple, codes)` for every tuple in lexicographic order, where
    /// `codes[i] = sum_j x_j[t_j(i)] r^j`.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], &[u32])) {
        let m = self.m;
        let mut tuple = vec![self.identity; m];
        for t in tuple.iter_mut().skip(1) {
            *t = 0;
        }
        // prefix[j] holds codes of images 0..=j
        let mut prefix: Vec<Vec<u32>> = vec![vec![0; self.n]; m];
        prefix[0] = self.reference.iter().map(|&x| x as u32).collect();
        let strides: Vec<u32> = (0..m).map(|j| (self.r as u32).pow(j as u32)).collect();
        let mut dirty = 1;
        loop {
            for j in dirty..m {
                let (done, rest) = prefix.split_at_mut(j);
                let src = &done[j - 1];
                let pix = &self.aligned[j - 1][tuple[j]];
                for ((d, &s), &x) in rest[0].iter_mut().zip(src).zip(pix) {
                    *d = s + x as u32 * strides[j];
                }
            }
            f(&tuple, &prefix[m - 1]);
            // odometer
            let mut j = m - 1;
            loop {
                if j == 0 {
                    return;
                }
                tuple[j] += 1;
                if tuple[j] < self.order {
                    break;
                }
                tuple[j] = 0;
                j -= 1;
            }
            dirty = j;
        }
    }
}

/// Index of the first maximum (strict comparison) and whether another entry
/// lies within `tol` of it.
pub fn argmax_with_tie(values: &[f64], tol: f64) -> Option<(usize, bool)> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(b) if v > values[b] => best = Some(i),
            _ => {}
        }
    }
    let b = best?;
    let near = values.iter().filter(|&&v| v == values[b] || (v - values[b]).abs() <= tol).count();
    Some((b, near > 1))
}
