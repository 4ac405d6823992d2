//! Cost-call benchmark of the reductive pipeline against the standard one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::generate_dla;
use crate::cartan::CartanStructure;
use crate::error::{Error, Result};
use crate::optimize::{run_redcard_with, run_standard_with, Backend, Method, SynthesisConfig};
use crate::pauli::PauliSum;

/// Residual that counts as converged.
pub const BENCH_TARGET: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seeds: Vec<u64>,
    pub target_residual: f64,
    pub synthesis: SynthesisConfig,
}

impl BenchConfig {
    pub fn new(n_seeds: u64, first_seed: u64) -> Self {
        Self {
            seeds: (first_seed..first_seed + n_seeds).collect(),
            target_residual: BENCH_TARGET,
            synthesis: SynthesisConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub seed: u64,
    pub method: Method,
    pub cost_calls: u64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: Method,
    pub runs: usize,
    pub converged: usize,
    /// Statistics below are over converging runs only.
    pub mean_calls: f64,
    pub std_calls: f64,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    pub mean_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub redcard: MethodStats,
    pub standard: MethodStats,
    /// `standard.mean_calls / redcard.mean_calls`.
    pub call_ratio: f64,
    pub runs: Vec<BenchRun>,
}

impl BenchReport {
    pub fn any_converged(&self) -> bool {
        self.redcard.converged > 0 || self.standard.converged > 0
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn stats(method: Method, runs: &[BenchRun]) -> MethodStats {
    let mine: Vec<_> = runs.iter().filter(|r| r.method == method).collect();
    let ok: Vec<_> = mine.iter().filter(|r| r.converged).collect();
    let (mean_calls, std_calls) = mean_std(&ok.iter().map(|r| r.cost_calls as f64).collect::<Vec<_>>());
    let (mean_iterations, std_iterations) = mean_std(&ok.iter().map(|r| r.iterations as f64).collect::<Vec<_>>());
    let (mean_residual, _) = mean_std(&ok.iter().map(|r| r.residual).collect::<Vec<_>>());
    MethodStats {
        method,
        runs: mine.len(),
        converged: ok.len(),
        mean_calls,
        std_calls,
        mean_iterations,
        std_iterations,
        mean_residual,
    }
}

/// Runs both pipelines for every seed, in parallel on the current pool.
pub fn bench(hamiltonian: &PauliSum, config: &BenchConfig) -> Result<BenchReport> {
    if !matches!(config.synthesis.backend, Backend::Exact) {
        return Err(Error::Precondition("bench compares exact-backend cost calls".into()));
    }
    let dla = generate_dla(hamiltonian, config.synthesis.max_dim)?;
    let structure = CartanStructure::build(&dla, hamiltonian, &config.synthesis.decompose_options())?;
    let mut base = config.synthesis.clone();
    base.stop.target_residual = Some(config.target_residual);

    let jobs: Vec<(u64, Method)> =
        config.seeds.iter().flat_map(|&s| [(s, Method::Redcard), (s, Method::Standard)]).collect();
    let runs = jobs
        .par_iter()
        .map(|&(seed, method)| {
            let cfg = base.clone().with_seed(seed);
            let res = match method {
                Method::Redcard => run_redcard_with(hamiltonian, &structure, &cfg)?,
                Method::Standard => run_standard_with(hamiltonian, &structure, &cfg)?,
            };
            Ok(BenchRun {
                seed,
                method,
                cost_calls: res.cost_calls,
                iterations: res.iterations,
                residual: res.residual,
                converged: res.residual <= config.target_residual && res.iterations <= cfg.max_iters,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let redcard = stats(Method::Redcard, &runs);
    let standard = stats(Method::Standard, &runs);
    Ok(BenchReport {
        config: config.clone(),
        call_ratio: standard.mean_calls / redcard.mean_calls,
        redcard,
        standard,
        runs,
    })
}
