//! Experiment configuration: JSON with a versioned schema, unknown keys rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use infreg::analysis::{Algorithm, Score, TrialSetup};
use infreg::model::ChannelModelSpec;
use infreg::{GroupSpec, SceneModel};

use crate::error::CliError;

pub const SCHEMA: &str = "infreg.experiment/1";

/// Cap on `n * |G|`, the size of a materialized group.
pub const MAX_GROUP_ENTRIES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub model: ModelConfig,
    pub group: GroupSpec,
    pub algorithm: Algorithm,
    /// Success event counted in the curve; defaults per algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<Score>,
    pub sweep: Sweep,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alphabet: usize,
    pub scenes: SceneModel,
    pub channels: ChannelModelSpec,
}

/// Grid of `n` (fixed `m`) or of `m` (with a rule for `n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    N { m: usize, values: Vec<usize> },
    M { values: Vec<usize>, n: PixelRule },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PixelRule {
    Fixed(usize),
    /// `n = ceil(factor * log2 m)`.
    PerLog2M(f64),
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Point {
    pub x: usize,
    pub m: usize,
    pub n: usize,
}

/// Lowercase hex SHA-256 of the config bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    /// Parses and validates; errors name the offending field.
    pub fn parse(bytes: &[u8]) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(if path == "." { "config" } else { &path }, e.into_inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn score(&self) -> Score {
        self.score.unwrap_or_else(|| self.algorithm.default_score())
    }

    pub fn points(&self) -> Vec<Point> {
        match &self.sweep {
            Sweep::N { m, values } => values.iter().map(|&n| Point { x: n, m: *m, n }).collect(),
            Sweep::M { values, n } => values
                .iter()
                .map(|&m| {
                    let n = match *n {
                        PixelRule::Fixed(n) => n,
                        PixelRule::PerLog2M(f) => (f * (m as f64).log2()).ceil() as usize,
                    };
                    Point { x: m, m, n }
                })
                .collect(),
        }
    }

    pub fn setup(&self, p: Point) -> Result<TrialSetup, CliError> {
        Ok(TrialSetup {
            scenes: self.model.scenes.clone(),
            channels: self.model.channels.build(self.model.alphabet).map_err(|e| invalid("model.channels", e))?,
            group: self.group,
            m: p.m,
            n: p.n,
        })
    }

    /// Every check that can fail before a single trial runs, including the search guards.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(invalid("schema", format!("expected \"{SCHEMA}\", got \"{}\"", self.schema)));
        }
        if self.model.alphabet != self.model.scenes.r() {
            return Err(invalid(
                "model.alphabet",
                format!("{} does not match the scene prior over {} symbols", self.model.alphabet, self.model.scenes.r()),
            ));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        let values = match &self.sweep {
            Sweep::N { values, .. } | Sweep::M { values, .. } => values,
        };
        if values.is_empty() {
            return Err(invalid("sweep.values", "empty grid"));
        }
        if let Sweep::M { n: PixelRule::PerLog2M(f), .. } = self.sweep {
            if !(f > 0.0) {
                return Err(invalid("sweep.n.per_log2_m", format!("{f} must be positive")));
            }
        }
        if let Score::Image { index } = self.score() {
            if let Some(p) = self.points().iter().find(|p| index >= p.m) {
                return Err(invalid("score.index", format!("{index} out of range for m={}", p.m)));
            }
        }
        for p in self.points() {
            if p.m == 0 || p.n == 0 {
                return Err(invalid("sweep", format!("point m={}, n={} is empty", p.m, p.n)));
            }
            if let Some(a) = self.model.scenes.assignment() {
                if a.len() != p.m {
                    return Err(invalid("model.scenes.assignment", format!("covers {} images, sweep point has m={}", a.len(), p.m)));
                }
            }
            let setup = self.setup(p)?;
            if let Some(arity) = setup.channels.max_cluster() {
                let largest = match self.model.scenes.assignment() {
                    Some(a) => (0..self.model.scenes.scene_count()).map(|s| a.iter().filter(|&&b| b == s).count()).max().unwrap_or(0),
                    // random assignment can put every image in one cluster
                    None => p.m,
                };
                if largest > arity {
                    return Err(invalid("model.channels", format!("joint channel of arity {arity} cannot corrupt a cluster of {largest} images")));
                }
            }
            let entries = p.n.saturating_mul(self.group.order(p.n));
            if entries > MAX_GROUP_ENTRIES {
                return Err(invalid("group", format!("n={} gives {entries} transform entries, above {MAX_GROUP_ENTRIES}", p.n)));
            }
            self.group.build(p.n).map_err(|e| invalid("group", format!("n={}: {e}", p.n)))?;
            self.algorithm.validate(&setup).map_err(|e| invalid("algorithm", format!("m={}, n={}: {e}", p.m, p.n)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> String {
        r#"{
            "schema": "infreg.experiment/1",
            "model": {
                "alphabet": 2,
                "scenes": {"prior": [0.5, 0.5], "scene_count": 1},
                "channels": {"kind": "iid", "channel": {"kind": "bsc", "alpha": 0.1}}
            },
            "group": {"kind": "ring"},
            "algorithm": {"name": "mmi_pairwise"},
            "sweep": {"axis": "n", "m": 2, "values": [32, 64]},
            "trials": 10,
            "seed": 7
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_expands_points() {
        let cfg = ExperimentConfig::parse(sample().as_bytes()).unwrap();
        assert_eq!(cfg.points(), vec![Point { x: 32, m: 2, n: 32 }, Point { x: 64, m: 2, n: 64 }]);
        assert_eq!(cfg.score(), Score::Strict);
    }

    #[test]
    fn m_sweep_with_log_rule() {
        let s = sample().replace(
            r#""sweep": {"axis": "n", "m": 2, "values": [32, 64]}"#,
            r#""sweep": {"axis": "m", "values": [8, 32], "n": {"per_log2_m": 40}}"#,
        );
        let cfg = ExperimentConfig::parse(s.as_bytes()).unwrap();
        assert_eq!(cfg.points()[1], Point { x: 32, m: 32, n: 200 });
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let s = sample().replace(r#""trials": 10"#, r#""trials": 10, "tirals": 3"#);
        let e = ExperimentConfig::parse(s.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("tirals"), "{e}");
        let s = sample().replace(r#""alpha": 0.1"#, r#""alpha": 0.1, "beta": 2"#);
        let e = ExperimentConfig::parse(s.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("model.channels") && e.contains("beta"), "{e}");
    }

    #[test]
    fn field_level_messages() {
        let s = sample().replace(r#""alpha": 0.1"#, r#""alpha": 1.5"#);
        let e = ExperimentConfig::parse(s.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("model.channels") && e.contains("alpha"), "{e}");
        let s = sample().replace(r#""schema": "infreg.experiment/1""#, r#""schema": "v0""#);
        assert!(ExperimentConfig::parse(s.as_bytes()).unwrap_err().to_string().contains("schema"));
        let s = sample().replace(r#""algorithm": {"name": "mmi_pairwise"}"#, r#""algorithm": {"name": "mm"}"#).replace(r#""m": 2, "values": [32, 64]"#, r#""m": 3, "values": [32, 2048]"#);
        let e = ExperimentConfig::parse(s.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("algorithm") && e.contains("2048"), "{e}");
    }

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
