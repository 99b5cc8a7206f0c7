pub mod bench;
pub mod colorize;
pub mod distance;
pub mod flow;
pub mod icp;

use anyhow::{bail, Result};
use geowass::{GdConfig, Optimizer, SmoothingConfig};

use crate::cli::SearchArgs;

/// Annealing iterations when `--iters` is not given.
pub const DEFAULT_ANNEAL_ITERS: usize = 500;

/// Seed for a stochastic command, or an error naming the command.
pub fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None => bail!("{what} is stochastic and needs --seed"),
    }
}

pub fn smoothing(search: &SearchArgs, seed: u64) -> SmoothingConfig {
    SmoothingConfig { copies: search.copies, epsilon: search.eps, seed }
}

pub fn gd(search: &SearchArgs, seed: u64) -> GdConfig {
    GdConfig {
        learning_rate: search.lr,
        iterations: search.iters.unwrap_or(GdConfig::default().iterations),
        optimizer: Optimizer::Adam,
        seed,
        resample_noise: true,
    }
}
