use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use gpi_core::central::run_centralized;
use gpi_core::dist::{run_distributed, DistConfig};
use gpi_core::error::GpiError;
use gpi_core::graph::{laplacian, max_weighted_indegree, random_strongly_connected};
use gpi_core::montecarlo::{fit_slope, run_montecarlo, summary_csv, trials_csv, MonteCarloConfig};
use gpi_core::netsim::{baseline_congest_rounds, congest_equivalent_rounds, ExecMode};
use gpi_core::spectral::{gac_oracle, GacReport};
use gpi_core::trace::{central_trace_csv, node_trace_csv, scenario_stable_from, Trace};

use crate::args::{default_delta, GenSpec, GraphSource, RunArgs, ScheduleArg};
use crate::Failure;

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    #[arg(long, value_enum, default_value = "adaptive")]
    pub schedule: ScheduleArg,
    /// Cap on Taylor-loop rounds per iteration.
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Cap on observer rounds per iteration.
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Step nodes on the thread pool; results are identical.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarloArgs {
    #[arg(long, value_delimiter = ',', default_value = "6,12,24,48")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability of each non-cycle edge in the generated digraphs.
    #[arg(long, default_value_t = 1.0)]
    pub prob: f64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Step size is `1 / max in-degree - delta_margin`.
    #[arg(long, default_value_t = 0.01)]
    pub delta_margin: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "adaptive")]
    pub schedule: ScheduleArg,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Csv,
    Json,
}

fn write(dir: Option<&Path>, name: &str, contents: &str) -> Result<(), Failure> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serialization") + "\n"
}

fn gpi_failure(e: GpiError) -> Failure {
    match e {
        GpiError::NonConvergence { .. } => Failure::non_convergence(e.to_string()),
        other => Failure::input(other.to_string()),
    }
}

fn spectrum_json(values: impl Iterator<Item = (f64, f64)>) -> Value {
    values.map(|(re, im)| json!([re, im])).collect()
}

fn oracle_report(source: &GraphSource, delta: Option<f64>) -> Result<(GacReport, f64), Failure> {
    let loaded = source.load()?;
    let g = &loaded.graph;
    let delta = delta
        .or(loaded.example.as_ref().map(|e| e.delta))
        .unwrap_or_else(|| default_delta(g));
    let report = gac_oracle(&laplacian(g), delta).map_err(|e| Failure::input(e.to_string()))?;
    Ok((report, max_weighted_indegree(g)))
}

pub fn oracle(source: &GraphSource, delta: Option<f64>, out: Option<&Path>) -> Result<(), Failure> {
    let (r, max_indegree) = oracle_report(source, delta)?;
    let mut doc = serde_json::to_value(&r).expect("report serialization");
    doc["max_indegree"] = json!(max_indegree);
    doc["delta_interval"] = json!([0.0, 1.0 / max_indegree]);
    doc["laplacian_spectrum"] = spectrum_json(r.laplacian_spectrum.iter().map(|z| (z.re, z.im)));
    doc["modified_spectrum"] = spectrum_json(r.modified_spectrum.iter().map(|z| (z.re, z.im)));
    if r.multiplicity_violation {
        eprintln!("warning: the minimum real part is attained by more than one eigenvalue or pair");
    }
    let text = pretty(&doc);
    print!("{text}");
    write(out, "oracle.json", &text)
}

pub fn centralized(source: &GraphSource, run: &RunArgs, with_oracle: bool) -> Result<(), Failure> {
    let loaded = source.load()?;
    let cfg = run.config(&loaded)?;
    let out = run.out.as_deref();
    let mut summary = json!({
        "n": loaded.graph.n(),
        "delta": cfg.delta,
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
    });
    if with_oracle {
        let r = gac_oracle(&laplacian(&loaded.graph), cfg.delta)
            .map_err(|e| Failure::input(e.to_string()))?;
        summary["oracle_gac"] = json!(r.gac);
        summary["oracle_kind"] = json!(r.kind);
    }
    match run_centralized(&loaded.graph, &cfg) {
        Ok(res) => {
            write(out, "trace.csv", &central_trace_csv(&res.trace))?;
            write(
                out,
                "trace.json",
                &serde_json::to_string(&res.trace).expect("trace json"),
            )?;
            summary["converged"] = json!(true);
            summary["estimate"] = json!(res.estimate);
            summary["scenario"] = json!(res.scenario);
            summary["iterations"] = json!(res.iterations);
            summary["scenario_stable_from"] = json!(scenario_stable_from(
                res.trace.iter().map(|r| (r.k, &r.scenario)),
                res.scenario
            ));
            if let Some(g) = summary.get("oracle_gac").and_then(Value::as_f64) {
                summary["oracle_error"] = json!((res.estimate - g).abs());
            }
            let text = pretty(&summary);
            print!("{text}");
            write(out, "summary.json", &text)
        }
        Err(GpiError::NonConvergence {
            max_iter,
            last_estimate,
            trace,
        }) => {
            if let Trace::Central(t) = trace.as_ref() {
                write(out, "trace.csv", &central_trace_csv(t))?;
                write(
                    out,
                    "trace.json",
                    &serde_json::to_string(t).expect("trace json"),
                )?;
            }
            summary["converged"] = json!(false);
            summary["estimate"] = json!(last_estimate);
            summary["iterations"] = json!(max_iter);
            let text = pretty(&summary);
            print!("{text}");
            write(out, "summary.json", &text)?;
            Err(Failure::non_convergence(format!(
                "no convergence after {max_iter} iterations"
            )))
        }
        Err(e) => Err(gpi_failure(e)),
    }
}

pub fn distributed(source: &GraphSource, run: &RunArgs, args: &DistArgs) -> Result<(), Failure> {
    let loaded = source.load()?;
    let mut cfg = DistConfig::new(run.config(&loaded)?);
    cfg.schedule = args.schedule.into();
    if let Some(l) = args.l_max {
        cfg.l_max = l;
    }
    if let Some(m) = args.m_max {
        cfg.m_max = m;
    }
    if args.parallel {
        cfg.exec = ExecMode::Parallel;
    }
    let n = loaded.graph.n();
    let out = run.out.as_deref();
    let res = match run_distributed(&loaded.graph, &cfg) {
        Ok(res) => res,
        Err(GpiError::NonConvergence {
            max_iter, trace, ..
        }) => {
            if let Trace::Distributed(t) = trace.as_ref() {
                write(out, "trace.csv", &node_trace_csv(t))?;
            }
            return Err(Failure::non_convergence(format!(
                "no convergence after {max_iter} iterations"
            )));
        }
        Err(e) => return Err(gpi_failure(e)),
    };
    write(out, "trace.csv", &node_trace_csv(&res.trace))?;
    write(
        out,
        "trace.json",
        &serde_json::to_string(&res.trace).expect("trace json"),
    )?;
    write(out, "stats.json", &(res.stats.to_json() + "\n"))?;
    let summary = json!({
        "n": n,
        "delta": cfg.base.delta,
        "epsilon": cfg.base.epsilon,
        "seed": cfg.base.seed,
        "converged": true,
        "estimates": res.estimates,
        "scenarios": res.scenarios,
        "iterations": res.iterations,
        "stats": serde_json::to_value(&res.stats).expect("stats serialization"),
        "congest_rounds": congest_equivalent_rounds(&res.stats, n),
        "baseline_congest_rounds": baseline_congest_rounds(&res.stats, n),
        "loop_lengths": res.loop_lengths,
    });
    let text = pretty(&summary);
    print!("{text}");
    write(out, "summary.json", &text)
}

pub fn montecarlo(args: &MonteCarloArgs) -> Result<(), Failure> {
    if args.sizes.is_empty() || args.sizes.iter().any(|&n| n < 2) {
        return Err(Failure::input("sizes must be at least 2"));
    }
    if args.trials == 0 {
        return Err(Failure::input("trials must be at least 1"));
    }
    let cfg = MonteCarloConfig {
        sizes: args.sizes.clone(),
        trials: args.trials,
        seed: args.seed,
        extra_edge_prob: args.prob,
        epsilon: args.epsilon,
        delta_margin: args.delta_margin,
        max_iter: args.max_iter,
        schedule: args.schedule.into(),
    };
    let (trials, summary) = run_montecarlo(&cfg);
    let table = summary_csv(&summary);
    print!("{table}");
    let out = args.out.as_deref();
    write(out, "montecarlo.csv", &table)?;
    write(out, "trials.csv", &trials_csv(&trials))?;
    if summary.len() >= 2 {
        let ns: Vec<f64> = summary.iter().map(|s| s.n as f64).collect();
        let gpi = fit_slope(
            &ns,
            &summary
                .iter()
                .map(|s| s.mean_congest_rounds)
                .collect::<Vec<_>>(),
        );
        let base = fit_slope(
            &ns,
            &summary
                .iter()
                .map(|s| s.mean_baseline_congest_rounds)
                .collect::<Vec<_>>(),
        );
        let fit = json!({ "gpi_slope": gpi, "baseline_slope": base, "ratio": gpi / base });
        eprintln!("slope fit: {fit}");
        write(out, "slopes.json", &pretty(&fit))?;
    }
    let failed: usize = summary.iter().map(|s| s.failed).sum();
    if failed > 0 {
        eprintln!("warning: {failed} trials failed; see trials.csv");
    }
    Ok(())
}

pub fn generate(spec: GenSpec, format: GraphFormat, output: Option<&Path>) -> Result<(), Failure> {
    let g = random_strongly_connected(spec.n, spec.prob, spec.seed);
    let text = match format {
        GraphFormat::Csv => g.to_edge_list(),
        GraphFormat::Json => g.to_json() + "\n",
    };
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
