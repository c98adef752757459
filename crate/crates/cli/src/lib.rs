//! Command implementations behind the `infreg` binary.

pub mod app;
pub mod config;
pub mod error;
pub mod run;
pub mod verify;

pub use config::{ExperimentConfig, Point, PixelRule, Sweep};
pub use error::CliError;
pub use run::{run, simulate, truth_summary, LoadedConfig, Manifest, RunOutcome};
pub use verify::{run_all, run_suite, SuiteReport, VerifyOptions, SUITES};

/// Worker pool: explicit count, else `INFREG_THREADS`, else rayon's default.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let threads = match threads {
        Some(t) => Some(t),
        None => match std::env::var("INFREG_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Argument(format!("INFREG_THREADS={v} is not a count")))?),
            Err(_) => None,
        },
    };
    if threads == Some(0) {
        return Err(CliError::Argument("thread count must be at least 1".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    builder.build().map_err(|e| CliError::Argument(format!("thread pool: {e}")))
}
