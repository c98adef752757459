use super::pmf::{encode, table_size};
use super::profile::{EntropyProfile, EntropyTable};
use crate::error::{Error, Result};
use crate::model::{common_shape, Image};
use crate::transform::Transform;

/// Empirical counts of aligned pixel tuples across several images.
#[derive(Debug, Clone, PartialEq)]
pub struct JointHistogram {
    dims: Vec<usize>,
    counts: Vec<usize>,
    n: usize,
}

impl JointHistogram {
    /// Counts `(x_1[p_1(i)], .., x_m[p_m(i)])` over pixels `i`.
    pub fn new(images: &[Image], transforms: &[Transform]) -> Result<Self> {
        let (n, _) = common_shape_any(images)?;
        if transforms.len() != images.len() {
            return Err(Error::LengthMismatch { expected: images.len(), got: transforms.len() });
        }
        let dims: Vec<usize> = images.iter().map(Image::alphabet).collect();
        let size = table_size(&dims)?;
        let aligned = images
            .iter()
            .zip(transforms)
            .map(|(im, t)| t.apply(im.pixels()))
            .collect::<Result<Vec<_>>>()?;
        let mut counts = vec![0; size];
        let mut xs = vec![0usize; images.len()];
        for i in 0..n {
            for (x, row) in xs.iter_mut().zip(&aligned) {
                *x = row[i] as usize;
            }
            counts[encode(&xs, &dims)] += 1;
        }
        Ok(JointHistogram { dims, counts, n })
    }

    /// Histogram of the images as given (identity transforms).
    pub fn untransformed(images: &[Image]) -> Result<Self> {
        let (n, _) = common_shape_any(images)?;
        Self::new(images, &vec![Transform::identity(n); images.len()])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, xs: &[usize]) -> usize {
        self.counts[encode(xs, &self.dims)]
    }

    /// Nonzero `(code, count)` pairs in code order.
    pub fn distinct(&self) -> Vec<(usize, usize)> {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c)).collect()
    }

    pub fn profile(&self) -> Result<EntropyProfile> {
        if self.n == 0 {
            return Err(Error::EmptyHistogram);
        }
        EntropyProfile::from_counts(&self.dims, &self.distinct(), &EntropyTable::new(self.n))
    }
}

// images may have different alphabets here
fn common_shape_any(images: &[Image]) -> Result<(usize, ())> {
    let first = images.first().ok_or(Error::EmptyHistogram)?;
    let n = first.len();
    if let Some(im) = images.iter().find(|im| im.len() != n) {
        return Err(Error::LengthMismatch { expected: n, got: im.len() });
    }
    Ok((n, ()))
}

/// Reusable scratch space for counting per-pixel tuple codes.
///
/// Codes are `sum_j x_j r^j` over a common alphabet `r`.
#[derive(Debug, Clone)]
pub struct CodeCounter {
    counts: Vec<u32>,
    touched: Vec<u32>,
    table: EntropyTable,
}

impl CodeCounter {
    /// For `n` pixels and `size` possible codes.
    pub fn new(n: usize, size: usize) -> Result<Self> {
        if size > 1 << 26 {
            return Err(Error::GuardViolation(format!("{size} tuple codes")));
        }
        Ok(CodeCounter { counts: vec![0; size], touched: Vec::with_capacity(n.min(size)), table: EntropyTable::new(n) })
    }

    pub fn table(&self) -> &EntropyTable {
        &self.table
    }

    fn tally(&mut self, codes: &[u32]) {
        for &c in codes {
            let slot = &mut self.counts[c as usize];
            if *slot == 0 {
                self.touched.push(c);
            }
            *slot += 1;
        }
        // a fixed summation order makes equal histograms give equal bits
        self.touched.sort_unstable();
    }

    fn reset(&mut self) {
        for &c in &self.touched {
            self.counts[c as usize] = 0;
        }
        self.touched.clear();
    }

    /// Plug-in entropy of the code sequence.
    pub fn entropy(&mut self, codes: &[u32]) -> f64 {
        self.tally(codes);
        let h = self.table.entropy(self.touched.iter().map(|&c| self.counts[c as usize] as usize));
        self.reset();
        h
    }

    /// Nonzero `(code, count)` pairs in code order.
    pub fn distinct(&mut self, codes: &[u32]) -> Vec<(usize, usize)> {
        self.tally(codes);
        let out = self.touched.iter().map(|&c| (c as usize, self.counts[c as usize] as usize)).collect();
        self.reset();
        out
    }

    /// Entropies of every subset of the `m` coordinates.
    pub fn profile(&mut self, codes: &[u32], m: usize, r: usize) -> Result<EntropyProfile> {
        let distinct = self.distinct(codes);
        EntropyProfile::from_counts(&vec![r; m], &distinct, &self.table)
    }
}

/// Per-pixel codes of aligned images over alphabet `r`.
pub fn tuple_codes(images: &[Image], transforms: &[Transform]) -> Result<Vec<u32>> {
    let (n, r) = common_shape(images)?;
    if transforms.len() != images.len() {
        return Err(Error::LengthMismatch { expected: images.len(), got: transforms.len() });
    }
    table_size(&vec![r; images.len()])?;
    let mut codes = vec![0u32; n];
    let mut stride = 1u32;
    for (im, t) in images.iter().zip(transforms) {
        for (c, &x) in codes.iter_mut().zip(&t.apply(im.pixels())?) {
            *c += x as u32 * stride;
        }
        stride *= r as u32;
    }
    Ok(codes)
}
