//! Sweeps, region reports and verification suites behind the `ckn` binary.

use anyhow::{Context, Result};

pub mod config;
pub mod sweep;
pub mod verify;

/// Worker-pool width variable; unset means one worker per logical core.
pub const WORKERS_ENV: &str = "CKN_WORKERS";

pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => {
            let n: usize = s.trim().parse().with_context(|| format!("{WORKERS_ENV}={s}"))?;
            anyhow::ensure!(n >= 1, "{WORKERS_ENV} must be at least 1");
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn worker_pool() -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(worker_count()?).build()?)
}
