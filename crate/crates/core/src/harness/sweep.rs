//! Seed sweeps: the same configuration run across a seed list, in parallel
//! when the `parallel` feature is enabled, with per-checkpoint mean and
//! standard deviation aggregation.

use crate::error::{Error, Result};

use super::config::{PolicyId, RegimeId, RunConfig};
use super::run::{run_experiment, RunResult};

/// Aggregated sweep output. Checkpoints are identical across seeds because
/// they only depend on the horizon.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub policy: PolicyId,
    pub regime: RegimeId,
    pub checkpoints: Vec<u64>,
    pub regret_mean: Vec<f64>,
    pub regret_std: Vec<f64>,
    pub violation_mean: Vec<f64>,
    pub violation_std: Vec<f64>,
    pub lambda_mean: Vec<f64>,
    pub lambda_std: Vec<f64>,
    pub ee_mean: Vec<f64>,
    pub ee_std: Vec<f64>,
    pub expected_power_mean: Vec<f64>,
    pub expected_power_std: Vec<f64>,
    /// Per-seed results, seed order.
    pub runs: Vec<RunResult>,
    /// Seeds whose run failed, with the error text. Successful results are
    /// still aggregated.
    pub failures: Vec<(u64, String)>,
}

impl SweepResult {
    /// Mean final regret across completed seeds.
    pub fn final_regret_mean(&self) -> f64 {
        *self.regret_mean.last().unwrap_or(&f64::NAN)
    }

    /// Index of a checkpoint round.
    pub fn checkpoint_index(&self, t: u64) -> Option<usize> {
        self.checkpoints.iter().position(|&x| x == t)
    }
}

fn run_one(base: &RunConfig, seed: u64) -> (u64, Result<RunResult>) {
    let mut cfg = base.clone();
    cfg.seed = seed;
    (seed, run_experiment(&cfg))
}

#[cfg(feature = "parallel")]
fn run_all(base: &RunConfig, seeds: &[u64], parallelism: usize) -> Vec<(u64, Result<RunResult>)> {
    if parallelism <= 1 {
        return seeds.iter().map(|&s| run_one(base, s)).collect();
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build();
    match pool {
        Ok(pool) => pool.install(|| seeds.par_iter().map(|&s| run_one(base, s)).collect()),
        Err(_) => seeds.iter().map(|&s| run_one(base, s)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_all(base: &RunConfig, seeds: &[u64], _parallelism: usize) -> Vec<(u64, Result<RunResult>)> {
    seeds.iter().map(|&s| run_one(base, s)).collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `base` once per seed (seeds override the config's own) and
/// aggregates per-checkpoint statistics. Individual run failures are
/// collected, not fatal, as long as at least one seed completes.
pub fn sweep(base: &RunConfig, seeds: &[u64], parallelism: usize) -> Result<SweepResult> {
    if seeds.is_empty() {
        return Err(Error::Config("sweep requires at least one seed".into()));
    }
    let outcomes = run_all(base, seeds, parallelism);
    let mut runs = Vec::with_capacity(seeds.len());
    let mut failures = Vec::new();
    for (seed, out) in outcomes {
        match out {
            Ok(r) => runs.push(r),
            Err(e) => failures.push((seed, e.to_string())),
        }
    }
    if runs.is_empty() {
        let (seed, msg) = failures.first().cloned().unwrap();
        return Err(Error::Invariant(format!(
            "all seeds failed; seed {seed}: {msg}"
        )));
    }
    let checkpoints: Vec<u64> = runs[0].records.iter().map(|r| r.t).collect();
    let columns = checkpoints.len();
    let collect = |f: &dyn Fn(usize, &RunResult) -> f64| -> (Vec<f64>, Vec<f64>) {
        let mut means = Vec::with_capacity(columns);
        let mut stds = Vec::with_capacity(columns);
        for i in 0..columns {
            let vals: Vec<f64> = runs.iter().map(|r| f(i, r)).collect();
            let (m, s) = mean_std(&vals);
            means.push(m);
            stds.push(s);
        }
        (means, stds)
    };
    let (regret_mean, regret_std) = collect(&|i, r| r.records[i].regret);
    let (violation_mean, violation_std) = collect(&|i, r| r.records[i].violation);
    let (lambda_mean, lambda_std) = collect(&|i, r| r.records[i].lambda);
    let (ee_mean, ee_std) = collect(&|i, r| r.records[i].ee);
    let (expected_power_mean, expected_power_std) = collect(&|i, r| r.records[i].expected_power);
    Ok(SweepResult {
        policy: base.policy,
        regime: base.regime,
        checkpoints,
        regret_mean,
        regret_std,
        violation_mean,
        violation_std,
        lambda_mean,
        lambda_std,
        ee_mean,
        ee_std,
        expected_power_mean,
        expected_power_std,
        runs,
        failures,
    })
}
