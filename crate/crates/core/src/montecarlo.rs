//! Round-count scaling of the distributed iteration on random digraphs.

use rayon::prelude::*;
use serde::Serialize;

use crate::central::GpiConfig;
use crate::dist::{run_distributed, DistConfig, LoopSchedule};
use crate::graph::{max_weighted_indegree, random_strongly_connected};
use crate::netsim::{baseline_congest_rounds, congest_equivalent_rounds};

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub extra_edge_prob: f64,
    pub epsilon: f64,
    /// `delta = 1/Delta - delta_margin`.
    pub delta_margin: f64,
    pub max_iter: usize,
    pub schedule: LoopSchedule,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            sizes: vec![6, 12, 24, 48],
            trials: 20,
            seed: 0,
            extra_edge_prob: 1.0,
            epsilon: 0.01,
            delta_margin: 0.01,
            max_iter: 1000,
            schedule: LoopSchedule::Adaptive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub n: usize,
    pub trial: usize,
    pub iterations: usize,
    pub rounds: usize,
    pub congest_rounds: usize,
    pub baseline_congest_rounds: usize,
    pub max_payload_scalars: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSummary {
    pub n: usize,
    pub completed: usize,
    pub failed: usize,
    pub mean_iterations: f64,
    pub mean_rounds: f64,
    pub mean_congest_rounds: f64,
    pub std_congest_rounds: f64,
    pub mean_baseline_congest_rounds: f64,
    pub max_payload_scalars: usize,
}

/// Seed for trial `trial` at size `n`; distinct per `(seed, n, trial)`.
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((n as u64) << 32) ^ trial as u64
}

pub fn run_trial(cfg: &MonteCarloConfig, n: usize, trial: usize) -> TrialResult {
    let seed = trial_seed(cfg.seed, n, trial);
    let g = random_strongly_connected(n, cfg.extra_edge_prob, seed);
    let delta = 1.0 / max_weighted_indegree(&g) - cfg.delta_margin;
    let mut dist = DistConfig::new(GpiConfig {
        max_iter: cfg.max_iter,
        seed,
        ..GpiConfig::new(delta, cfg.epsilon)
    });
    dist.schedule = cfg.schedule;
    let mut out = TrialResult {
        n,
        trial,
        iterations: 0,
        rounds: 0,
        congest_rounds: 0,
        baseline_congest_rounds: 0,
        max_payload_scalars: 0,
        error: None,
    };
    match run_distributed(&g, &dist) {
        Ok(run) => {
            out.iterations = run.iterations;
            out.rounds = run.stats.rounds;
            out.congest_rounds = congest_equivalent_rounds(&run.stats, n);
            out.baseline_congest_rounds = baseline_congest_rounds(&run.stats, n);
            out.max_payload_scalars = run.stats.max_payload_scalars;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn summarize(n: usize, trials: &[TrialResult]) -> SizeSummary {
    let ok: Vec<&TrialResult> = trials
        .iter()
        .filter(|t| t.n == n && t.error.is_none())
        .collect();
    let col = |f: fn(&TrialResult) -> usize| ok.iter().map(|t| f(t) as f64).collect::<Vec<_>>();
    let (mean_congest, std_congest) = mean_std(&col(|t| t.congest_rounds));
    SizeSummary {
        n,
        completed: ok.len(),
        failed: trials
            .iter()
            .filter(|t| t.n == n && t.error.is_some())
            .count(),
        mean_iterations: mean_std(&col(|t| t.iterations)).0,
        mean_rounds: mean_std(&col(|t| t.rounds)).0,
        mean_congest_rounds: mean_congest,
        std_congest_rounds: std_congest,
        mean_baseline_congest_rounds: mean_std(&col(|t| t.baseline_congest_rounds)).0,
        max_payload_scalars: ok.iter().map(|t| t.max_payload_scalars).max().unwrap_or(0),
    }
}

/// Runs every `(n, trial)` pair concurrently; results come back in
/// `(n, trial)` order regardless of scheduling.
pub fn run_montecarlo(cfg: &MonteCarloConfig) -> (Vec<TrialResult>, Vec<SizeSummary>) {
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let trials: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(n, t)| run_trial(cfg, n, t))
        .collect();
    let summaries = cfg.sizes.iter().map(|&n| summarize(n, &trials)).collect();
    (trials, summaries)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv writer")).expect("utf-8")
}

pub fn summary_csv(rows: &[SizeSummary]) -> String {
    to_csv(rows)
}

pub fn trials_csv(rows: &[TrialResult]) -> String {
    to_csv(rows)
}
