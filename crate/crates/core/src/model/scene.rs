use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::channel::ChannelModel;
use super::image::{check_alphabet, Image};
use crate::error::{Error, Result};
use crate::info::Partition;
use crate::seed::{stream_rng, Stream};
use crate::transform::{Transform, TransformGroup};

const PMF_TOL: f64 = 1e-12;

pub(crate) fn check_pmf(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotAPmf(format!("{name} is empty")));
    }
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::NotAPmf(format!("{name} has a negative or non-finite entry")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PMF_TOL {
        return Err(Error::NotAPmf(format!("{name} sums to {s}")));
    }
    Ok(())
}

/// Scene prior and the law assigning images to scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSceneModel", into = "RawSceneModel")]
pub struct SceneModel {
    prior: Vec<f64>,
    scene_count: usize,
    scene_pmf: Vec<f64>,
    assignment: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSceneModel {
    prior: Vec<f64>,
    scene_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scene_pmf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assignment: Option<Vec<usize>>,
}

impl TryFrom<RawSceneModel> for SceneModel {
    type Error = Error;

    fn try_from(raw: RawSceneModel) -> Result<Self> {
        let pmf = raw.scene_pmf.unwrap_or_else(|| vec![1.0 / raw.scene_count.max(1) as f64; raw.scene_count]);
        let model = SceneModel::new(raw.prior, raw.scene_count, pmf)?;
        match raw.assignment {
            Some(a) => model.with_assignment(a),
            None => Ok(model),
        }
    }
}

impl From<SceneModel> for RawSceneModel {
    fn from(s: SceneModel) -> Self {
        RawSceneModel { prior: s.prior, scene_count: s.scene_count, scene_pmf: Some(s.scene_pmf), assignment: s.assignment }
    }
}

impl SceneModel {
    /// `prior` is the per-pixel scene law `P_R`; images pick one of
    /// `scene_count` scenes i.i.d. from `scene_pmf`.
    pub fn new(prior: Vec<f64>, scene_count: usize, scene_pmf: Vec<f64>) -> Result<Self> {
        check_alphabet(prior.len())?;
        check_pmf("prior", &prior)?;
        if scene_count == 0 {
            return Err(Error::InvalidParameter("scene_count must be at least 1".into()));
        }
        if scene_pmf.len() != scene_count {
            return Err(Error::SizeMismatch(format!("scene_pmf has {} entries for {scene_count} scenes", scene_pmf.len())));
        }
        check_pmf("scene_pmf", &scene_pmf)?;
        Ok(SceneModel { prior, scene_count, scene_pmf, assignment: None })
    }

    pub fn uniform(r: usize, scene_count: usize) -> Result<Self> {
        Self::new(vec![1.0 / r as f64; r], scene_count, vec![1.0 / scene_count.max(1) as f64; scene_count])
    }

    /// Pins image `j` to scene `assignment[j]` instead of drawing it.
    pub fn with_assignment(mut self, assignment: Vec<usize>) -> Result<Self> {
        if let Some(&s) = assignment.iter().find(|&&s| s >= self.scene_count) {
            return Err(Error::InvalidParameter(format!("assignment uses scene {s} of {}", self.scene_count)));
        }
        self.assignment = Some(assignment);
        Ok(self)
    }

    pub fn r(&self) -> usize {
        self.prior.len()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn scene_count(&self) -> usize {
        self.scene_count
    }

    pub fn scene_pmf(&self) -> &[f64] {
        &self.scene_pmf
    }

    pub fn assignment(&self) -> Option<&[usize]> {
        self.assignment.as_deref()
    }
}

/// Ground truth behind an [`Ensemble`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truth {
    /// Scene index of every image.
    pub assignment: Vec<usize>,
    /// Group index of the transform applied to every image.
    pub transform_indices: Vec<usize>,
    pub transforms: Vec<Transform>,
    pub partition: Partition,
    /// Two distinct used scenes drew identical pixel vectors.
    pub scene_collision: bool,
}

/// Observed images plus the truth that generated them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ensemble {
    pub alphabet: usize,
    pub images: Vec<Image>,
    pub truth: Truth,
}

fn samplers<'a>(r: usize, rows: impl Fn(usize) -> &'a [f64]) -> Result<Vec<WeightedIndex<f64>>> {
    (0..r).map(|x| WeightedIndex::new(rows(x)).map_err(|e| Error::NotStochastic(e.to_string()))).collect()
}

/// Draws scenes, assigns images, corrupts each cluster jointly per pixel and
/// transforms each image. The lowest-index image of every cluster is left
/// untransformed; the rest get uniform group elements.
pub fn generate_ensemble(
    scenes: &SceneModel,
    channels: &ChannelModel,
    group: &TransformGroup,
    m: usize,
    n: usize,
    seed: u64,
) -> Result<Ensemble> {
    let r = scenes.r();
    if channels.r() != r {
        return Err(Error::SizeMismatch(format!("scene alphabet {r}, channel alphabet {}", channels.r())));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidDims(format!("m={m}, n={n}")));
    }
    if group.n() != n {
        return Err(Error::LengthMismatch { expected: n, got: group.n() });
    }

    let assignment: Vec<usize> = match scenes.assignment() {
        Some(a) => {
            if a.len() != m {
                return Err(Error::SizeMismatch(format!("fixed assignment covers {} images, m={m}", a.len())));
            }
            a.to_vec()
        }
        None => {
            let dist = WeightedIndex::new(scenes.scene_pmf()).map_err(|e| Error::NotAPmf(e.to_string()))?;
            let mut rng = stream_rng(seed, Stream::Assignment);
            (0..m).map(|_| dist.sample(&mut rng)).collect()
        }
    };
    let partition = Partition::from_labels(&assignment);
    if let Some(max) = channels.max_cluster() {
        if let Some(b) = partition.blocks().iter().find(|b| b.len() > max) {
            return Err(Error::SizeMismatch(format!("cluster of {} images, channel arity {max}", b.len())));
        }
    }

    let prior = WeightedIndex::new(scenes.prior()).map_err(|e| Error::NotAPmf(e.to_string()))?;
    let mut rng = stream_rng(seed, Stream::Scene);
    let scene_pixels: Vec<Vec<usize>> =
        (0..scenes.scene_count()).map(|_| (0..n).map(|_| prior.sample(&mut rng)).collect()).collect();
    let mut used: Vec<usize> = assignment.clone();
    used.sort_unstable();
    used.dedup();
    let scene_collision = used.iter().enumerate().any(|(a, &s)| used[a + 1..].iter().any(|&t| scene_pixels[s] == scene_pixels[t]));

    let mut corrupted = vec![Vec::new(); m];
    let mut rng = stream_rng(seed, Stream::Channel);
    for block in partition.blocks() {
        let scene = &scene_pixels[assignment[block[0]]];
        let mut rows = vec![Vec::with_capacity(n); block.len()];
        match channels {
            // one output per image, never materializing the product table
            ChannelModel::Iid(w) => {
                let samplers = samplers(r, |x| w.row(x))?;
                for &x in scene {
                    for row in rows.iter_mut() {
                        row.push(samplers[x].sample(&mut rng) as u8);
                    }
                }
            }
            ChannelModel::Joint(_) => {
                let jc = channels.for_cluster(block.len())?;
                let samplers = samplers(r, |x| jc.slice(x))?;
                for &x in scene {
                    let mut code = samplers[x].sample(&mut rng);
                    for row in rows.iter_mut() {
                        row.push((code % r) as u8);
                        code /= r;
                    }
                }
            }
        }
        for (&j, row) in block.iter().zip(rows) {
            corrupted[j] = row;
        }
    }

    let mut rng = stream_rng(seed, Stream::Transform);
    let labels = partition.labels();
    let mut transform_indices = vec![group.identity_index(); m];
    for j in 0..m {
        if partition.blocks()[labels[j]][0] != j {
            transform_indices[j] = rng.gen_range(0..group.len());
        }
    }
    let transforms: Vec<Transform> = transform_indices.iter().map(|&g| group.get(g).clone()).collect();
    let images = corrupted
        .into_iter()
        .zip(&transforms)
        .map(|(pixels, t)| Image::new(r, t.apply(&pixels)?))
        .collect::<Result<Vec<_>>>()?;

    Ok(Ensemble {
        alphabet: r,
        images,
        truth: Truth { assignment, transform_indices, transforms, partition, scene_collision },
    })
}
