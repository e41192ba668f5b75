use std::path::PathBuf;

use clap::{Args, ValueEnum};

use gpi_core::builtin::{by_index, BuiltinExample};
use gpi_core::central::GpiConfig;
use gpi_core::dist::LoopSchedule;
use gpi_core::graph::{
    load_edge_list, max_weighted_indegree, random_strongly_connected, WeightedDigraph,
};

use crate::Failure;

/// Step size used when neither the command line nor a builtin example sets one.
const DEFAULT_DELTA_FRACTION: f64 = 0.9;
const DEFAULT_EPSILON: f64 = 5e-4;

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Edge-list file with `src,dst,weight` rows.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Builtin reference network.
    #[arg(long, value_name = "1|2", value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: Option<u8>,
    /// Random strongly connected digraph `n,prob,seed`.
    #[arg(long, value_name = "N,PROB,SEED", value_parser = parse_gen)]
    pub gen: Option<GenSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub prob: f64,
    pub seed: u64,
}

pub fn parse_gen(s: &str) -> Result<GenSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n, prob, seed] = parts[..] else {
        return Err(format!("expected n,prob,seed, got {s:?}"));
    };
    let n: usize = n.parse().map_err(|e| format!("n: {e}"))?;
    let prob: f64 = prob.parse().map_err(|e| format!("prob: {e}"))?;
    let seed: u64 = seed.parse().map_err(|e| format!("seed: {e}"))?;
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    if !(0.0..=1.0).contains(&prob) {
        return Err("prob must lie in [0, 1]".into());
    }
    Ok(GenSpec { n, prob, seed })
}

pub struct LoadedGraph {
    pub graph: WeightedDigraph,
    pub example: Option<BuiltinExample>,
}

impl GraphSource {
    pub fn load(&self) -> Result<LoadedGraph, Failure> {
        if let Some(path) = &self.graph {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            let graph = load_edge_list(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            return Ok(LoadedGraph {
                graph,
                example: None,
            });
        }
        if let Some(index) = self.example {
            let ex = by_index(index).expect("range checked by the parser");
            return Ok(LoadedGraph {
                graph: ex.graph.clone(),
                example: Some(ex),
            });
        }
        let spec = self.gen.expect("clap enforces one graph source");
        Ok(LoadedGraph {
            graph: random_strongly_connected(spec.n, spec.prob, spec.seed),
            example: None,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Step size; defaults to the example's value or 0.9 / max in-degree.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Termination threshold on the subspace distance.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Seed for the random initial vector.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial vector as comma-separated values, or a file holding them.
    #[arg(long, value_name = "CSV")]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Directory for trace and summary files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Resolves defaults against the loaded graph. Builtin examples supply
    /// their published step size, threshold and initial vector.
    pub fn config(&self, loaded: &LoadedGraph) -> Result<GpiConfig, Failure> {
        let ex = loaded.example.as_ref();
        let delta = self
            .delta
            .or(ex.map(|e| e.delta))
            .unwrap_or_else(|| default_delta(&loaded.graph));
        let epsilon = self
            .epsilon
            .or(ex.map(|e| e.epsilon))
            .unwrap_or(DEFAULT_EPSILON);
        let initial_vector = match &self.x0 {
            Some(spec) => Some(parse_vector(spec)?),
            None => ex.map(|e| e.x0.clone()),
        };
        Ok(GpiConfig {
            seed: self.seed,
            max_iter: self.max_iter,
            initial_vector,
            ..GpiConfig::new(delta, epsilon)
        })
    }
}

pub fn default_delta(g: &WeightedDigraph) -> f64 {
    DEFAULT_DELTA_FRACTION / max_weighted_indegree(g)
}

fn parse_vector(spec: &str) -> Result<Vec<f64>, Failure> {
    let text = match std::fs::read_to_string(spec) {
        Ok(t) => t,
        Err(_) => spec.to_string(),
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Failure::input(format!("--x0 entry {s:?}: {e}")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Adaptive,
    Linear,
}

impl From<ScheduleArg> for LoopSchedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Adaptive => LoopSchedule::Adaptive,
            ScheduleArg::Linear => LoopSchedule::Linear,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_spec_parsing() {
        assert_eq!(
            parse_gen("8, 0.3, 42").unwrap(),
            GenSpec {
                n: 8,
                prob: 0.3,
                seed: 42
            }
        );
        assert!(parse_gen("8,0.3").is_err());
        assert!(parse_gen("1,0.3,0").is_err());
        assert!(parse_gen("5,1.5,0").is_err());
    }

    #[test]
    fn inline_vector() {
        assert_eq!(parse_vector("1, 2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        assert!(parse_vector("1,x").is_err());
    }
}
