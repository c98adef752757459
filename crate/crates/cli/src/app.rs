//! Argument parsing and dispatch for the `infreg` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::run::{run, simulate, truth_summary, LoadedConfig};
use crate::verify::{run_all, run_suite, VerifyOptions};
use crate::thread_pool;

#[derive(Debug, Parser)]
#[command(name = "infreg", version, about = "Joint clustering and registration of discrete images")]
pub struct Cli {
    /// Worker threads; falls back to INFREG_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one ensemble at the first sweep point.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte-Carlo error curve over the sweep.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the self-verification suites.
    Verify {
        /// Restrict to the named suites.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation errors, not suite failures
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let pool = thread_pool(cli.threads)?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { config, out, seed } => {
            let e = simulate(&LoadedConfig::load(&config, seed)?, &out)?;
            print!("{}", truth_summary(&e));
        }
        Command::Run { config, out, seed } => {
            let outcome = run(&LoadedConfig::load(&config, seed)?, &out)?;
            print!("{}", outcome.curve.to_csv());
            eprintln!("wrote {} in {:.1}s", out.display(), outcome.manifest.wall_seconds);
        }
        Command::Verify { suites, seed } => {
            let mut opts = VerifyOptions::default();
            if let Some(s) = seed {
                opts.seed = s;
            }
            let reports = if suites.is_empty() {
                run_all(&opts)
            } else {
                suites.iter().map(|s| run_suite(s, &opts)).collect::<Result<Vec<_>, _>>()?
            };
            let mut failed = Vec::new();
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status} {:<24} {:>7} checks {:>5} failed {:>8.2}s", r.name, r.checks, r.failed, r.seconds);
                for f in &r.failures {
                    println!("    {f}");
                }
                if !r.passed() {
                    failed.push(r.name);
                }
            }
            if !failed.is_empty() {
                return Err(CliError::SuiteFailure(failed.join(", ")));
            }
        }
    }
    Ok(())
}
