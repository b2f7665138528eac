//! Experiment drivers: `run` and `compare`, CSV output, and summaries.
//!
//! Seeds (and comparison arms) execute in a worker pool; results are
//! collected in configuration order and written by a single writer, so the
//! output bytes never depend on scheduling.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{load_config, resolve, ConfigError, EnvBuild, RunPlan};
use crate::error::Error;
use crate::optim::{train, CurveRecord, RepairTotals, TrainOutcome};
use crate::policy::{applicable_baselines, AdapterMode};

/// Failures after configuration was accepted; the CLI maps this to exit
/// code 3.
#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("runtime error: {0}")]
    Train(#[from] Error),
    #[error("io error: {context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunnerError {
    let context = context.into();
    move |source| RunnerError::Io { context, source }
}

/// Per-adapter aggregate of a finished run.
#[derive(Debug, Clone)]
pub struct ArmSummary {
    pub adapter: AdapterMode,
    pub final_evals: Vec<f64>,
    pub final_eval_mean: f64,
    pub final_eval_std: f64,
    pub tracking_errors: Vec<Option<f64>>,
    pub repair: RepairTotals,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(adapter: AdapterMode, outcome: &TrainOutcome) -> ArmSummary {
    let finals = outcome.final_evals();
    let (mean, std) = mean_std(&finals);
    ArmSummary {
        adapter,
        final_eval_mean: mean,
        final_eval_std: std,
        final_evals: finals,
        tracking_errors: outcome.seeds.iter().map(|s| s.tracking_error).collect(),
        repair: outcome.repair(),
    }
}

/// The fixed learning-curve schema.
pub const CURVE_HEADER: &str = "seed,rollout_index,return,evaluation_return";

fn push_record(out: &mut String, prefix: Option<&str>, rec: &CurveRecord) {
    if let Some(p) = prefix {
        out.push_str(p);
        out.push(',');
    }
    write!(out, "{},{}", rec.seed, rec.rollout_index).unwrap();
    out.push(',');
    if let Some(v) = rec.train_return {
        write!(out, "{v}").unwrap();
    }
    out.push(',');
    if let Some(v) = rec.eval_return {
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn curve_csv(records: &[CurveRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 24 + 64);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for rec in records {
        push_record(&mut out, None, rec);
    }
    out
}

fn compare_csv(arms: &[(AdapterMode, TrainOutcome)]) -> String {
    let mut out = String::new();
    out.push_str("adapter,");
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for (adapter, outcome) in arms {
        for rec in &outcome.curve.records {
            push_record(&mut out, Some(adapter.name()), rec);
        }
    }
    out
}

fn summary_csv(summaries: &[ArmSummary]) -> String {
    let mut out = String::from(
        "adapter,seeds,final_eval_mean,final_eval_std,tracking_error_mean,actions,actions_repaired,repair_fraction\n",
    );
    for s in summaries {
        let tracking: Vec<f64> = s.tracking_errors.iter().filter_map(|e| *e).collect();
        let tracking_mean = if tracking.is_empty() {
            String::new()
        } else {
            format!("{}", tracking.iter().sum::<f64>() / tracking.len() as f64)
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.adapter.name(),
            s.final_evals.len(),
            s.final_eval_mean,
            s.final_eval_std,
            tracking_mean,
            s.repair.actions,
            s.repair.actions_repaired,
            s.repair.repaired_fraction(),
        )
        .unwrap();
    }
    out
}

fn render_summary_table(summaries: &[ArmSummary]) -> String {
    let mut out = String::from("adapter      final evaluation (mean +/- std)   repair fraction\n");
    for s in summaries {
        writeln!(
            out,
            "{:<12} {:>12.6} +/- {:<12.6}   {:>8.4}",
            s.adapter.name(),
            s.final_eval_mean,
            s.final_eval_std,
            s.repair.repaired_fraction(),
        )
        .unwrap();
    }
    out
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let threads = jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(f)
}

fn ensure_output(plan: &RunPlan) -> Result<PathBuf, RunnerError> {
    let dir = plan.output.clone().ok_or_else(|| {
        ConfigError("output: directory required (set `output` in the config or pass --output)".into())
    })?;
    std::fs::create_dir_all(&dir).map_err(io_err(format!("creating {}", dir.display())))?;
    Ok(dir)
}

fn write_echo(plan: &RunPlan, dir: &Path) -> Result<(), RunnerError> {
    let text = serde_json::to_string_pretty(&plan.echo)
        .map_err(|e| ConfigError(e.to_string()))?;
    std::fs::write(dir.join("config.echo"), text + "\n")
        .map_err(io_err("writing config.echo"))
}

fn export_targets(plan: &RunPlan, dir: &Path) -> Result<(), RunnerError> {
    match &plan.env_build {
        EnvBuild::QuatTraj(targets) => {
            crate::env::write_quat_traj(&dir.join("targets.txt"), targets)
                .map_err(io_err("writing targets.txt"))
        }
        EnvBuild::SpdTraj(targets) => {
            crate::env::write_spd_traj(&dir.join("targets.txt"), targets)
                .map_err(io_err("writing targets.txt"))
        }
        _ => Ok(()),
    }
}

/// Result paths and aggregates of a `run` invocation.
#[derive(Debug)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub curve_path: PathBuf,
    pub summary: ArmSummary,
    pub outcome: TrainOutcome,
}

fn run_plan_arm(plan: &RunPlan, adapter: AdapterMode) -> Result<TrainOutcome, Error> {
    let setup = plan.setup(adapter);
    let build = plan.env_build.clone();
    train(&setup, &move || build.build(), &plan.echo.seeds)
}

/// Executes the configured run and writes `curve.csv` plus `config.echo`
/// (and `targets.txt` for trajectory environments).
pub fn cmd_run(
    config_path: &Path,
    jobs: Option<usize>,
    output: Option<PathBuf>,
) -> Result<RunReport, RunnerError> {
    let cfg = load_config(config_path)?;
    let plan = resolve(cfg, true, output)?;
    let adapter = plan.adapter.expect("validated");
    let dir = ensure_output(&plan)?;

    let outcome = with_pool(jobs, || run_plan_arm(&plan, adapter))?;

    let curve_path = dir.join("curve.csv");
    std::fs::write(&curve_path, curve_csv(&outcome.curve.records))
        .map_err(io_err("writing curve.csv"))?;
    write_echo(&plan, &dir)?;
    export_targets(&plan, &dir)?;

    Ok(RunReport {
        output_dir: dir,
        curve_path,
        summary: summarize(adapter, &outcome),
        outcome,
    })
}

/// Result paths and aggregates of a `compare` invocation.
#[derive(Debug)]
pub struct CompareReport {
    pub output_dir: PathBuf,
    pub compare_path: PathBuf,
    pub summary_path: PathBuf,
    pub summaries: Vec<ArmSummary>,
    pub arms: Vec<(AdapterMode, TrainOutcome)>,
    pub table: String,
}

/// Runs the geometric adapter and every applicable baseline with shared
/// seeds; writes `compare.csv` (curve rows tagged by adapter),
/// `summary.csv`, and `config.echo`.
pub fn cmd_compare(
    config_path: &Path,
    jobs: Option<usize>,
    output: Option<PathBuf>,
) -> Result<CompareReport, RunnerError> {
    let cfg = load_config(config_path)?;
    let plan = resolve(cfg, false, output)?;
    let kinds = plan.env_build.kinds();
    let mut adapters = vec![AdapterMode::Grl];
    adapters.extend(applicable_baselines(&kinds));
    let dir = ensure_output(&plan)?;

    let results: Result<Vec<TrainOutcome>, Error> = with_pool(jobs, || {
        use rayon::prelude::*;
        adapters
            .par_iter()
            .map(|adapter| run_plan_arm(&plan, *adapter))
            .collect()
    });
    let arms: Vec<(AdapterMode, TrainOutcome)> = adapters.into_iter().zip(results?).collect();

    let summaries: Vec<ArmSummary> = arms
        .iter()
        .map(|(adapter, outcome)| summarize(*adapter, outcome))
        .collect();

    let compare_path = dir.join("compare.csv");
    std::fs::write(&compare_path, compare_csv(&arms)).map_err(io_err("writing compare.csv"))?;
    let summary_path = dir.join("summary.csv");
    std::fs::write(&summary_path, summary_csv(&summaries))
        .map_err(io_err("writing summary.csv"))?;
    write_echo(&plan, &dir)?;
    export_targets(&plan, &dir)?;

    Ok(CompareReport {
        output_dir: dir,
        compare_path,
        summary_path,
        table: render_summary_table(&summaries),
        summaries,
        arms,
    })
}
