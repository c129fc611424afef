use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::algorithm::{AlgorithmConfig, Mode};
use crate::metrics::IgdForm;
use crate::problems::{builtin_instance, load_instance_dir, InstanceDefinition, BUILTIN_NAMES};
use crate::variation::MutationRate;

pub const DEFAULT_REPETITIONS: usize = 21;
pub const DEFAULT_BUDGET_PER_TASK: u64 = 50_000;
pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 1000;
pub const DEFAULT_OUTPUT_DIR: &str = "results";

/// A configuration problem located at a key of the source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmEntry {
    pub label: String,
    pub config: AlgorithmConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricOptions {
    pub reference_size: usize,
    pub hv_reference: Vec<f64>,
    pub igd_form: IgdForm,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            reference_size: 1000,
            hv_reference: vec![1.0, 1.0],
            igd_form: IgdForm::Printed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceDefinition>,
    pub algorithms: Vec<AlgorithmEntry>,
    pub repetitions: usize,
    pub root_seed: u64,
    pub budget_per_task: u64,
    pub checkpoint_interval: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub metrics: MetricOptions,
}

impl ExperimentConfig {
    /// Everything that determines run outputs, in a stable textual form.
    /// Output location and worker count are excluded.
    pub fn canonical(&self) -> String {
        let instances: Vec<String> = self.instances.iter().map(|i| format!("{i:?}")).collect();
        format!(
            "instances={instances:?}\nalgorithms={:?}\nrepetitions={}\nroot_seed={}\nbudget_per_task={}\ncheckpoint_interval={}\nmetrics={:?}\n",
            self.algorithms,
            self.repetitions,
            self.root_seed,
            self.budget_per_task,
            self.checkpoint_interval,
            self.metrics
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Spanned<RawExperiment>,
    #[serde(default)]
    algorithms: BTreeMap<String, Spanned<RawAlgorithm>>,
    metrics: Option<Spanned<RawMetrics>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    instances: Spanned<Vec<Spanned<String>>>,
    algorithms: Spanned<Vec<Spanned<String>>>,
    repetitions: Option<Spanned<i64>>,
    root_seed: Option<Spanned<i64>>,
    budget_per_task: Option<Spanned<i64>>,
    checkpoint_interval: Option<Spanned<i64>>,
    output_dir: Option<Spanned<String>>,
    workers: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgorithm {
    mode: Option<Spanned<String>>,
    population_size: Option<Spanned<i64>>,
    neighborhood_size: Option<Spanned<i64>>,
    beta: Option<Spanned<f64>>,
    replacement_cap: Option<Spanned<i64>>,
    scale_factor: Option<Spanned<f64>>,
    crossover_rate: Option<Spanned<f64>>,
    mutation_eta: Option<Spanned<f64>>,
    mutation_probability: Option<Spanned<f64>>,
    rho: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetrics {
    reference_size: Option<Spanned<i64>>,
    hv_reference: Option<Spanned<Vec<f64>>>,
    igd_form: Option<Spanned<String>>,
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, offset: usize) -> usize {
        let end = offset.min(self.text.len());
        self.text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
    }

    fn err(&self, key: impl Into<String>, span: std::ops::Range<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            key: key.into(),
            line: self.line(span.start),
            message: message.into(),
        }
    }

    fn positive(&self, key: &str, value: &Spanned<i64>, what: &str) -> Result<u64, ConfigError> {
        if *value.get_ref() < 1 {
            return Err(self.err(key, value.span(), format!("{what} must be ≥ 1")));
        }
        Ok(*value.get_ref() as u64)
    }
}

/// Reads and validates a configuration file. Relative instance directories
/// and output paths resolve against the file's directory.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        key: path.display().to_string(),
        line: 0,
        message: format!("cannot read configuration: {e}"),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_str(&text, &base)
}

pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<ExperimentConfig, ConfigError> {
    let src = Source { text };
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| src.line(s.start)).unwrap_or(0);
        ConfigError {
            key: syntax_key(e.message()),
            line,
            message: e.message().trim().to_string(),
        }
    })?;
    let exp = raw.experiment.get_ref();

    let mut instances: Vec<InstanceDefinition> = Vec::new();
    let mut seen = HashSet::new();
    if exp.instances.get_ref().is_empty() {
        return Err(src.err("experiment.instances", exp.instances.span(), "at least one instance is required"));
    }
    for entry in exp.instances.get_ref() {
        let name = entry.get_ref();
        let instance = if BUILTIN_NAMES.contains(&name.as_str()) {
            builtin_instance(name)
        } else {
            load_instance_dir(&base_dir.join(name))
        }
        .map_err(|e| src.err("experiment.instances", entry.span(), format!("{name}: {e}")))?;
        if !seen.insert(instance.name().to_string()) {
            return Err(src.err(
                "experiment.instances",
                entry.span(),
                format!("duplicate instance name {}", instance.name()),
            ));
        }
        instances.push(instance);
    }

    if exp.algorithms.get_ref().is_empty() {
        return Err(src.err("experiment.algorithms", exp.algorithms.span(), "at least one algorithm is required"));
    }
    let mut algorithms = Vec::new();
    let mut labels = HashSet::new();
    for entry in exp.algorithms.get_ref() {
        let label = entry.get_ref();
        if !labels.insert(label.clone()) {
            return Err(src.err("experiment.algorithms", entry.span(), format!("duplicate algorithm {label}")));
        }
        if label.is_empty() || label.contains(['/', '\\', ',']) || label.starts_with('.') {
            return Err(src.err("experiment.algorithms", entry.span(), format!("invalid algorithm label {label:?}")));
        }
        let config = resolve_algorithm(&src, label, entry.span(), raw.algorithms.get(label))?;
        algorithms.push(AlgorithmEntry {
            label: label.clone(),
            config,
        });
    }
    for (label, section) in &raw.algorithms {
        if !labels.contains(label) {
            return Err(src.err(
                format!("algorithms.{label}"),
                section.span(),
                "section is not listed in experiment.algorithms",
            ));
        }
    }

    let repetitions = match &exp.repetitions {
        Some(v) => src.positive("experiment.repetitions", v, "repetitions")? as usize,
        None => DEFAULT_REPETITIONS,
    };
    let root_seed = exp.root_seed.as_ref().map_or(0, |v| *v.get_ref() as u64);
    let budget_per_task = match &exp.budget_per_task {
        Some(v) => src.positive("experiment.budget_per_task", v, "budget_per_task")?,
        None => DEFAULT_BUDGET_PER_TASK,
    };
    let checkpoint_interval = match &exp.checkpoint_interval {
        Some(v) => src.positive("experiment.checkpoint_interval", v, "checkpoint_interval")?,
        None => DEFAULT_CHECKPOINT_INTERVAL,
    };
    let workers = match &exp.workers {
        Some(v) => src.positive("experiment.workers", v, "workers")? as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let output_dir = base_dir.join(exp.output_dir.as_ref().map_or(DEFAULT_OUTPUT_DIR, |v| v.get_ref().as_str()));

    let span_of = |v: &Option<Spanned<i64>>| v.as_ref().map_or(raw.experiment.span(), |v| v.span());
    for instance in &instances {
        for alg in &algorithms {
            let population = alg.config.population_size as u64;
            let needed = instance.task_count() as u64 * population;
            if checkpoint_interval < needed {
                return Err(src.err(
                    "experiment.checkpoint_interval",
                    span_of(&exp.checkpoint_interval),
                    format!(
                        "checkpoint_interval {checkpoint_interval} is below K·N = {needed} for {} with {}",
                        instance.name(),
                        alg.label
                    ),
                ));
            }
            if budget_per_task < population {
                return Err(src.err(
                    "experiment.budget_per_task",
                    span_of(&exp.budget_per_task),
                    format!("budget_per_task {budget_per_task} is below N = {population} for {}", alg.label),
                ));
            }
        }
    }

    let metrics = match &raw.metrics {
        Some(m) => resolve_metrics(&src, m.get_ref(), &instances)?,
        None => MetricOptions::default(),
    };

    Ok(ExperimentConfig {
        instances,
        algorithms,
        repetitions,
        root_seed,
        budget_per_task,
        checkpoint_interval,
        output_dir,
        workers,
        metrics,
    })
}

fn syntax_key(message: &str) -> String {
    // Messages from the parser quote the offending field in backticks.
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "document".to_string())
}

fn resolve_algorithm(
    src: &Source<'_>,
    label: &str,
    label_span: std::ops::Range<usize>,
    section: Option<&Spanned<RawAlgorithm>>,
) -> Result<AlgorithmConfig, ConfigError> {
    let Some(section) = section else {
        let mode: Mode = label.parse().map_err(|_| {
            src.err(
                "experiment.algorithms",
                label_span.clone(),
                format!("{label} is neither a preset nor a configured [algorithms.{label}] section"),
            )
        })?;
        return Ok(AlgorithmConfig::preset(mode));
    };
    let raw = section.get_ref();
    let key = |field: &str| format!("algorithms.{label}.{field}");
    let mode = match &raw.mode {
        Some(m) => m
            .get_ref()
            .parse::<Mode>()
            .map_err(|e| src.err(key("mode"), m.span(), e.to_string()))?,
        None => label.parse::<Mode>().map_err(|_| {
            src.err(format!("algorithms.{label}"), section.span(), "missing required key mode")
        })?,
    };
    let mut config = AlgorithmConfig::preset(mode);
    let count = |field: &str, v: &Spanned<i64>| -> Result<usize, ConfigError> {
        if *v.get_ref() < 0 {
            return Err(src.err(key(field), v.span(), format!("{field} must be non-negative")));
        }
        Ok(*v.get_ref() as usize)
    };
    if let Some(v) = &raw.population_size {
        config.population_size = count("population_size", v)?;
    }
    if let Some(v) = &raw.neighborhood_size {
        config.neighborhood_size = count("neighborhood_size", v)?;
    }
    if let Some(v) = &raw.replacement_cap {
        config.replacement_cap = Some(count("replacement_cap", v)?);
    }
    if let Some(v) = &raw.beta {
        config.beta = *v.get_ref();
    }
    if let Some(v) = &raw.rho {
        config.rho = *v.get_ref();
    }
    if let Some(v) = &raw.scale_factor {
        config.variation.scale_factor = *v.get_ref();
    }
    if let Some(v) = &raw.crossover_rate {
        config.variation.crossover_rate = *v.get_ref();
    }
    if let Some(v) = &raw.mutation_eta {
        config.variation.mutation_eta = *v.get_ref();
    }
    if let Some(v) = &raw.mutation_probability {
        config.variation.mutation_rate = MutationRate::Fixed(*v.get_ref());
    }
    config
        .validate()
        .map_err(|e| src.err(format!("algorithms.{label}"), section.span(), e.to_string()))?;
    Ok(config)
}

fn resolve_metrics(
    src: &Source<'_>,
    raw: &RawMetrics,
    instances: &[InstanceDefinition],
) -> Result<MetricOptions, ConfigError> {
    let mut out = MetricOptions::default();
    if let Some(v) = &raw.reference_size {
        if *v.get_ref() < 2 {
            return Err(src.err("metrics.reference_size", v.span(), "reference_size must be ≥ 2"));
        }
        out.reference_size = *v.get_ref() as usize;
    }
    if let Some(v) = &raw.hv_reference {
        let point = v.get_ref();
        let objectives = instances
            .first()
            .and_then(|i| i.tasks().first())
            .map_or(2, |t| t.space().objectives());
        if point.len() != objectives || point.iter().any(|c| !c.is_finite()) {
            return Err(src.err(
                "metrics.hv_reference",
                v.span(),
                format!("hv_reference must hold {objectives} finite coordinates"),
            ));
        }
        out.hv_reference = point.clone();
    }
    if let Some(v) = &raw.igd_form {
        out.igd_form = v
            .get_ref()
            .parse()
            .map_err(|e: crate::metrics::MetricError| src.err("metrics.igd_form", v.span(), e.to_string()))?;
    }
    Ok(out)
}
