//! Benchmark runners with seed and trial parallelism.
//!
//! Work is spread over a rayon pool sized by `WRKHS_THREADS` (all cores when
//! unset). Results are reduced in trial or seed order, so the thread count
//! never changes an output bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wrkhs_core::channel::{run_trial, EqualizationConfig, EqualizationResult};
use wrkhs_core::synthetic::{run, SyntheticConfig, SyntheticRun};

use crate::error::{CliError, Result};

pub const THREADS_ENV: &str = "WRKHS_THREADS";

pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::input(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::input(format!("cannot start thread pool: {e}")))
}

/// All trials of `cfg`, in parallel, averaged in trial order.
pub fn equalization(cfg: &EqualizationConfig) -> Result<EqualizationResult> {
    cfg.validate()?;
    let curves = thread_pool()?.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, t))
            .collect::<wrkhs_core::Result<Vec<_>>>()
    })?;
    Ok(EqualizationResult::from_curves(&curves)?)
}

/// Runs `cfg` at seeds `cfg.seed, cfg.seed + 1, ..`, in parallel.
pub fn synthetic_sweep(cfg: &SyntheticConfig, seeds: usize) -> Result<Vec<SyntheticRun>> {
    cfg.validate()?;
    if seeds == 0 {
        return Err(CliError::input("need at least one seed"));
    }
    let runs = thread_pool()?.install(|| {
        (0..seeds as u64)
            .into_par_iter()
            .map(|i| {
                run(&SyntheticConfig {
                    seed: cfg.seed.wrapping_add(i),
                    ..cfg.clone()
                })
            })
            .collect::<wrkhs_core::Result<Vec<_>>>()
    })?;
    Ok(runs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Synthetic1,
    Synthetic2,
    Equalization,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Synthetic1 => "synthetic1",
            Benchmark::Synthetic2 => "synthetic2",
            Benchmark::Equalization => "equalization",
        }
    }
}
