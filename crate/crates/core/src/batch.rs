//! Independent runs of one scenario over many seeds.
//!
//! Each run is single-threaded; with the `parallel` feature runs are spread
//! over the rayon pool, otherwise they execute one after another. Output
//! order always follows the seed order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::harness::{run, RunOutput, Scenario};

pub fn run_seeds_sequential(scenario: &Scenario, seeds: &[u64]) -> Result<Vec<RunOutput>> {
    seeds
        .iter()
        .map(|&seed| run(&scenario.clone().with_seed(seed)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn run_seeds_parallel(scenario: &Scenario, seeds: &[u64]) -> Result<Vec<RunOutput>> {
    seeds
        .par_iter()
        .map(|&seed| run(&scenario.clone().with_seed(seed)))
        .collect()
}

/// Runs every seed, in parallel when the `parallel` feature is on.
pub fn run_seeds(scenario: &Scenario, seeds: &[u64]) -> Result<Vec<RunOutput>> {
    #[cfg(feature = "parallel")]
    {
        run_seeds_parallel(scenario, seeds)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_seeds_sequential(scenario, seeds)
    }
}

/// Runs several scenarios (each with its own seed) side by side.
pub fn run_all(scenarios: &[Scenario]) -> Result<Vec<RunOutput>> {
    #[cfg(feature = "parallel")]
    {
        scenarios.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        scenarios.iter().map(run).collect()
    }
}
