//! Experiment drivers for the kgnf laboratory.
//!
//! Every driver takes a resolved [`Config`], runs its sweep points on a
//! bounded worker pool and returns a report carrying the config, its hash,
//! per-point metrics, log-log fits and pass/fail gates.

pub mod config;
pub mod drift;
pub mod fit;
pub mod lifespan;
pub mod lipschitz;
pub mod nfcheck;
pub mod profile;
pub mod report;
pub mod strichartz;
pub mod trajectory;

pub use config::{Config, Experiment};
pub use fit::{loglog_fit, Fit};
pub use report::{Check, Gate, NfReport, Point, SweepReport, Table};

use kgnf_core::KgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error(transparent)]
    Core(#[from] KgError),
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Run(String),
}

pub type Result<T> = std::result::Result<T, ExpError>;

pub(crate) fn config_err(key: &str, msg: impl Into<String>) -> ExpError {
    ExpError::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

/// Worker count from `KGNF_THREADS`, else the available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("KGNF_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|k| k.get())
                .unwrap_or(1)
        })
}

/// Runs independent jobs on a pool capped by [`thread_cap`]; results keep input order.
pub fn run_jobs<T, R, F>(items: &[T], job: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap())
        .build()
    {
        Ok(pool) => pool.install(|| items.par_iter().map(&job).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running sequentially");
            items.iter().map(job).collect()
        }
    }
}
