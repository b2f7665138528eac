//! `geomrl` — run and compare manifold policy-search experiments.
//!
//! Exit codes: 0 success, 1 failed selftest, 2 configuration error,
//! 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use geomrl::runner::{cmd_compare, cmd_run, RunnerError};
use geomrl::selftest;

#[derive(Parser)]
#[command(name = "geomrl", version, about = "Policy search with non-Euclidean actions")]
struct Cli {
    /// Worker threads for seeds and comparison arms (default: hardware
    /// threads).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory, overriding the config's `output` field.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; writes curve.csv and config.echo.
    Run { config: PathBuf },
    /// Run the geometric adapter against every applicable baseline with
    /// shared seeds; writes compare.csv and summary.csv.
    Compare { config: PathBuf },
    /// Run the property oracles over the geometric primitives and
    /// optimizers.
    Selftest {
        /// Only run checks whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
    },
}

fn exit_for(err: &RunnerError) -> u8 {
    match err {
        RunnerError::Config(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => match cmd_run(&config, cli.jobs, cli.output) {
            Ok(report) => {
                println!("wrote {}", report.curve_path.display());
                let s = &report.summary;
                println!(
                    "{}: final evaluation {:.6} ± {:.6} over {} seeds",
                    s.adapter.name(),
                    s.final_eval_mean,
                    s.final_eval_std,
                    s.final_evals.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(exit_for(&e))
            }
        },
        Command::Compare { config } => match cmd_compare(&config, cli.jobs, cli.output) {
            Ok(report) => {
                println!("wrote {}", report.compare_path.display());
                println!("wrote {}", report.summary_path.display());
                print!("{}", report.table);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(exit_for(&e))
            }
        },
        Command::Selftest { filter } => {
            let start = std::time::Instant::now();
            let outcomes = selftest::run_all(filter.as_deref());
            if outcomes.is_empty() {
                eprintln!("no checks match the filter");
                return ExitCode::from(1);
            }
            for o in &outcomes {
                println!(
                    "{} {:<36} {:>6} ms  {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.millis,
                    o.details
                );
            }
            let total = start.elapsed();
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!(
                "{}/{} checks passed in {:.1} s",
                outcomes.len() - failed,
                outcomes.len(),
                total.as_secs_f64()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
