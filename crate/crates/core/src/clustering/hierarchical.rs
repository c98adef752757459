use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::info::{tuple_codes, CodeCounter, Partition};
use crate::model::Image;
use crate::registration::{register_mm, RegistrationResult};
use crate::search::argmax_with_tie;
use crate::transform::{Transform, TransformGroup};

/// Divisive clustering levels: `levels[k - 1]` has `k` blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub levels: Vec<Partition>,
    /// Cluster-information gain of the split made at each level after the first.
    pub gains: Vec<f64>,
    pub registration: RegistrationResult,
}

impl Dendrogram {
    /// The level with `k` blocks.
    pub fn level(&self, k: usize) -> Option<&Partition> {
        k.checked_sub(1).and_then(|i| self.levels.get(i))
    }
}

/// Registers all images by max-multiinformation, then repeatedly splits the
/// cluster whose best two-way split has the largest cluster information.
pub fn cluster_hierarchical(images: &[Image], group: &TransformGroup) -> Result<Dendrogram> {
    let m = images.len();
    crate::info::check_partition_guard(m)?;
    let registration = register_mm(images, group)?;
    let transforms: Vec<Transform> = registration.estimates.iter().map(|&g| group.get(g).clone()).collect();
    let codes = tuple_codes(images, &transforms)?;
    let r = images[0].alphabet();
    let mut counter = CodeCounter::new(codes.len(), r.pow(m as u32))?;
    let profile = counter.profile(&codes, m, r)?;

    let mut current = Partition::single_block(m);
    let mut levels = vec![current.clone()];
    let mut gains = Vec::new();
    for _ in 1..m {
        let mut options: Vec<(usize, Vec<Vec<usize>>, f64)> = Vec::new();
        for (c, block) in current.blocks().iter().enumerate() {
            if block.len() < 2 {
                continue;
            }
            let splits: Vec<Vec<Vec<usize>>> =
                Partition::two_block(block.len()).map(|local| Partition::lift(&local, block)).collect();
            let scores: Vec<f64> = splits
                .iter()
                .map(|parts| parts.iter().fold(0.0, |acc, part| acc + profile.mi_mask(mask_of(part))))
                .collect();
            let (b, _) = argmax_with_tie(&scores, 0.0).expect("a block of size >= 2 has a split");
            options.push((c, splits[b].clone(), scores[b]));
        }
        let gains_here: Vec<f64> = options.iter().map(|o| o.2).collect();
        let (pick, _) = argmax_with_tie(&gains_here, 0.0).expect("some block can split");
        let (c, parts, gain) = options.swap_remove(pick);
        current = current.split_block(c, parts)?;
        levels.push(current.clone());
        gains.push(gain);
    }
    Ok(Dendrogram { levels, gains, registration })
}

fn mask_of(block: &[usize]) -> u32 {
    block.iter().fold(0, |acc, &i| acc | 1 << i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(s: &str) -> Image {
        Image::from_digits(2, s).unwrap()
    }

    #[test]
    fn pair_gives_two_levels() {
        let g = TransformGroup::ring(8).unwrap();
        let d = cluster_hierarchical(&[img("01101000"), img("11010001")], &g).unwrap();
        assert_eq!(d.levels, vec![Partition::single_block(2), Partition::singletons(2)]);
    }

    #[test]
    fn levels_refine_by_one_split() {
        let g = TransformGroup::ring_subgroup(16, 1).unwrap();
        let a = img("0110100110010110");
        let b = img("0011101001110100");
        let d = cluster_hierarchical(&[a.clone(), b.clone(), a.clone(), b], &g).unwrap();
        assert_eq!(d.levels.len(), 4);
        for (k, w) in d.levels.windows(2).enumerate() {
            assert_eq!(w[0].len(), k + 1);
            assert!(w[1].strictly_refines(&w[0]));
        }
        assert_eq!(d.level(2).unwrap(), &Partition::from_labels(&[0, 1, 0, 1]));
    }

    #[test]
    fn one_noiseless_cluster_still_produces_every_level() {
        let g = TransformGroup::ring(8).unwrap();
        let x = img("01101000");
        let ims = vec![x.clone(), x.transformed(g.get(2)).unwrap(), x.transformed(g.get(5)).unwrap()];
        let d = cluster_hierarchical(&ims, &g).unwrap();
        assert_eq!(d.levels.len(), 3);
        assert_eq!(d.registration.estimates, vec![0, 6, 3]);
    }
}
