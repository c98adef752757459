//! `infreg run` and `infreg simulate`.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use infreg::analysis::{error_point, run_trials, ErrorCurve, Score, TrialRecord};
use infreg::model::generate_ensemble;
use infreg::Ensemble;

use crate::config::{digest, ExperimentConfig, Point};
use crate::error::CliError;

/// Config plus the digest of the exact bytes it was parsed from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub digest: String,
}

impl LoadedConfig {
    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(CliError::io(path))?;
        let mut config = ExperimentConfig::parse(&bytes)?;
        if let Some(s) = seed {
            config.seed = s;
        }
        Ok(LoadedConfig { config, digest: digest(&bytes) })
    }
}

#[derive(Serialize)]
struct TrialLine<'a> {
    x: usize,
    m: usize,
    n: usize,
    #[serde(flatten)]
    record: &'a TrialRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointTiming {
    pub x: usize,
    pub seconds: f64,
    pub mean_trial_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_digest: String,
    pub seed: u64,
    pub trials: usize,
    pub score: Score,
    pub threads: usize,
    pub points: Vec<Point>,
    pub started_at: String,
    pub wall_seconds: f64,
    pub timing: Vec<PointTiming>,
    pub outputs: Vec<&'static str>,
}

pub struct RunOutcome {
    pub curve: ErrorCurve,
    pub manifest: Manifest,
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(CliError::io(path))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Runs every sweep point with the same master seed and writes
/// `trials.jsonl`, `curve.csv` and `manifest.json` under `out`.
pub fn run(loaded: &LoadedConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let cfg = &loaded.config;
    // every point is checked before any trial starts
    cfg.validate()?;
    let points = cfg.points();
    let setups = points.iter().map(|&p| cfg.setup(p)).collect::<Result<Vec<_>, _>>()?;
    create_dir(out)?;

    let score = cfg.score();
    let started_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let start = Instant::now();
    let mut jsonl = String::new();
    let mut curve = ErrorCurve { points: Vec::with_capacity(points.len()) };
    let mut timing = Vec::with_capacity(points.len());
    for (p, setup) in points.iter().zip(&setups) {
        let t0 = Instant::now();
        let records = run_trials(setup, &cfg.algorithm, cfg.trials, cfg.seed, &loaded.digest)?;
        let seconds = t0.elapsed().as_secs_f64();
        for record in &records {
            jsonl.push_str(&serde_json::to_string(&TrialLine { x: p.x, m: p.m, n: p.n, record })?);
            jsonl.push('\n');
        }
        let mean = records.iter().map(|r| r.wall_time.as_secs_f64()).sum::<f64>() / records.len() as f64;
        timing.push(PointTiming { x: p.x, seconds, mean_trial_seconds: mean });
        curve.points.push(error_point(p.x, &records, score));
    }

    write(&out.join("trials.jsonl"), jsonl.as_bytes())?;
    write(&out.join("curve.csv"), curve.to_csv().as_bytes())?;
    let manifest = Manifest {
        tool: "infreg",
        version: env!("CARGO_PKG_VERSION"),
        config_digest: loaded.digest.clone(),
        seed: cfg.seed,
        trials: cfg.trials,
        score,
        threads: rayon::current_num_threads(),
        points,
        started_at,
        wall_seconds: start.elapsed().as_secs_f64(),
        timing,
        outputs: vec!["trials.jsonl", "curve.csv"],
    };
    write(&out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(RunOutcome { curve, manifest })
}

/// Draws one ensemble at the first sweep point and writes `ensemble.json`.
pub fn simulate(loaded: &LoadedConfig, out: &Path) -> Result<Ensemble, CliError> {
    let cfg = &loaded.config;
    let p = cfg.points()[0];
    let setup = cfg.setup(p)?;
    let group = cfg.group.build(p.n)?;
    let ensemble = generate_ensemble(&setup.scenes, &setup.channels, &group, p.m, p.n, cfg.seed)?;
    create_dir(out)?;
    let mut json = serde_json::to_string_pretty(&ensemble)?;
    json.push('\n');
    write(&out.join("ensemble.json"), json.as_bytes())?;
    Ok(ensemble)
}

/// Human-readable truth of an ensemble.
pub fn truth_summary(e: &Ensemble) -> String {
    let t = &e.truth;
    let mut s = format!(
        "m={} n={} alphabet={}\npartition {}\ntransforms {:?}\n",
        e.images.len(),
        e.images.first().map_or(0, |im| im.len()),
        e.alphabet,
        t.partition,
        t.transform_indices
    );
    if t.scene_collision {
        s.push_str("warning: two scenes drew identical pixels\n");
    }
    s
}
