use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mtea_core::harness::{parse_config, run_experiment, summarize_dir, ExperimentConfig, Summary};
use mtea_core::problems::build_builtin_suite;

#[derive(Parser)]
#[command(name = "mtea", version, about = "Multitasking multiobjective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every run of an experiment and write its summaries.
    Run {
        config: PathBuf,
        /// Parallel runs (overrides experiment.workers).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (overrides experiment.output_dir).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the built-in benchmark instances.
    Suite,
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
    /// Rebuild summary tables from the runs persisted under a directory.
    Summarize { dir: PathBuf },
}

fn load(path: &Path, workers: Option<usize>, output: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut config = parse_config(path).with_context(|| format!("invalid configuration {}", path.display()))?;
    if let Some(w) = workers {
        anyhow::ensure!(w >= 1, "--workers must be ≥ 1");
        config.workers = w;
    }
    if let Some(o) = output {
        config.output_dir = o;
    }
    Ok(config)
}

fn print_ranks(summary: &Summary) {
    println!("{:<20} {:>10} {:>10}", "algorithm", "igd rank", "hv rank");
    for (a, name) in summary.algorithms.iter().enumerate() {
        println!(
            "{:<20} {:>10.3} {:>10.3}",
            name, summary.friedman_igd[a], summary.friedman_hv[a]
        );
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, workers, output } => {
            let config = load(&config, workers, output)?;
            let runs = config.instances.len() * config.algorithms.len() * config.repetitions;
            eprintln!(
                "running {runs} runs on {} workers into {}",
                config.workers,
                config.output_dir.display()
            );
            let outcome = run_experiment(&config)?;
            println!("completed {} runs", outcome.records.len());
            print_ranks(&outcome.summary);
        }
        Command::Suite => {
            println!("{:<6} {:<5} {:>3}  tasks", "name", "class", "D");
            for instance in build_builtin_suite() {
                let (i, s) = instance.category();
                let tasks: Vec<String> = instance
                    .tasks()
                    .iter()
                    .map(|t| format!("{}/{}", t.base().name(), t.shape().name()))
                    .collect();
                println!(
                    "{:<6} {:<5} {:>3}  {}",
                    instance.name(),
                    format!("{}{}", i.code(), s.code()),
                    instance.unified_dimension(),
                    tasks.join(", ")
                );
            }
        }
        Command::Validate { config } => {
            let config = load(&config, None, None)?;
            println!(
                "ok: {} instances, {} algorithms, {} repetitions, budget {} per task, checkpoint every {}",
                config.instances.len(),
                config.algorithms.len(),
                config.repetitions,
                config.budget_per_task,
                config.checkpoint_interval
            );
        }
        Command::Summarize { dir } => {
            let summary = summarize_dir(&dir)?;
            print_ranks(&summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
