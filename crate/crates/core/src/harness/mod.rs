//! Experiment orchestration: configuration, seeded repetitions, per-run
//! persistence and summary tables.

mod config;
mod output;
mod summary;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{
    parse_config, parse_config_str, AlgorithmEntry, ConfigError, ExperimentConfig, MetricOptions,
    DEFAULT_BUDGET_PER_TASK, DEFAULT_CHECKPOINT_INTERVAL, DEFAULT_OUTPUT_DIR, DEFAULT_REPETITIONS,
};
pub use output::{load_runs, read_front_csv, run_dir, write_run, write_summary};
pub use summary::{summarize, MedianTrace, MetricStats, Summary, SummaryRow};

use crate::algorithm::{run, run_moead_baseline, AlgorithmError, Checkpoint, MetricSettings, Mode};
use crate::problems::InstanceDefinition;
use crate::space::derive_seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error("output directory {path} is not writable: {reason}")]
    Unwritable { path: PathBuf, reason: String },
    #[error("i/o error at {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("inconsistent run records: {0}")]
    Inconsistent(String),
    #[error("no run records to summarize")]
    NoRecords,
    #[error("worker pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Everything one repetition of one algorithm on one instance produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    /// 1-based.
    pub repetition: usize,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub final_fronts: Vec<Vec<Vec<f64>>>,
    pub final_populations: Vec<Vec<Vec<f64>>>,
    pub wall_clock_seconds: f64,
}

impl RunRecord {
    pub fn final_checkpoint(&self) -> &Checkpoint {
        self.checkpoints.last().expect("runs record at least one checkpoint")
    }
}

/// Seed of one run; depends only on its coordinates in the experiment grid.
pub fn child_seed(root: u64, instance: &str, algorithm: &str, repetition: usize) -> u64 {
    derive_seed(
        root,
        &[instance.as_bytes(), algorithm.as_bytes(), &(repetition as u64).to_le_bytes()],
    )
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(config.canonical().as_bytes()))
}

fn metric_settings(config: &ExperimentConfig, interval: u64) -> MetricSettings {
    MetricSettings {
        reference_size: config.metrics.reference_size,
        hv_reference: config.metrics.hv_reference.clone(),
        igd_form: config.metrics.igd_form,
        checkpoint_interval: interval,
    }
}

/// Executes one run. Multitasking modes get `K * budget_per_task`
/// evaluations; the baseline solves every task separately on its own share
/// and its checkpoints report the summed evaluation count.
pub fn execute_run(
    config: &ExperimentConfig,
    instance: &InstanceDefinition,
    entry: &AlgorithmEntry,
    repetition: usize,
) -> Result<RunRecord> {
    let seed = child_seed(config.root_seed, instance.name(), &entry.label, repetition);
    let k = instance.task_count();
    let start = Instant::now();
    let (checkpoints, final_fronts, final_populations) = if entry.config.mode == Mode::MoeadBaseline {
        let settings = metric_settings(config, config.checkpoint_interval.div_ceil(k as u64));
        let traces = instance
            .tasks()
            .iter()
            .enumerate()
            .map(|(t, task)| {
                let task_seed = derive_seed(seed, &[b"task", &(t as u64).to_le_bytes()]);
                run_moead_baseline(task, &entry.config, config.budget_per_task, &settings, task_seed)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let count = traces[0].checkpoints.len();
        if traces.iter().any(|t| t.checkpoints.len() != count) {
            return Err(HarnessError::Inconsistent(
                "baseline task runs recorded different checkpoint counts".into(),
            ));
        }
        let checkpoints = (0..count)
            .map(|i| Checkpoint {
                evaluations: traces.iter().map(|t| t.checkpoints[i].evaluations).sum(),
                igd: traces.iter().map(|t| t.checkpoints[i].igd[0]).collect(),
                hv: traces.iter().map(|t| t.checkpoints[i].hv[0]).collect(),
            })
            .collect();
        let fronts = traces.iter().map(|t| t.final_fronts[0].clone()).collect();
        let pops = traces.iter().map(|t| t.final_populations[0].clone()).collect();
        (checkpoints, fronts, pops)
    } else {
        let settings = metric_settings(config, config.checkpoint_interval);
        let trace = run(instance, &entry.config, k as u64 * config.budget_per_task, &settings, seed)?;
        (trace.checkpoints, trace.final_fronts, trace.final_populations)
    };
    Ok(RunRecord {
        instance: instance.name().to_string(),
        algorithm: entry.label.clone(),
        repetition,
        seed,
        checkpoints,
        final_fronts,
        final_populations,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Creates `dir` if needed and proves it accepts new files.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    let unwritable = |e: std::io::Error| HarnessError::Unwritable {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    let probe = dir.join(".write-probe");
    std::fs::write(&probe, b"").map_err(unwritable)?;
    std::fs::remove_file(&probe).map_err(unwritable)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

/// Runs the whole grid on `config.workers` threads, writing each run's files
/// as soon as it finishes, then the index and summary tables.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    ensure_writable(&config.output_dir)?;
    let hash = config_hash(config);
    let jobs: Vec<(&InstanceDefinition, &AlgorithmEntry, usize)> = config
        .instances
        .iter()
        .flat_map(|i| {
            config
                .algorithms
                .iter()
                .flat_map(move |a| (1..=config.repetitions).map(move |r| (i, a, r)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|&(instance, entry, rep)| {
                let record = execute_run(config, instance, entry, rep)?;
                write_run(&config.output_dir, &record, &hash)?;
                Ok(record)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    output::write_index(&config.output_dir, &records)?;
    let summary = summarize(&records)?;
    write_summary(&config.output_dir, &summary)?;
    Ok(ExperimentOutcome { records, summary })
}

/// Re-derives and rewrites the summary tables from persisted runs.
pub fn summarize_dir(dir: &Path) -> Result<Summary> {
    let records = load_runs(dir)?;
    let summary = summarize(&records)?;
    write_summary(dir, &summary)?;
    Ok(summary)
}
