use std::collections::{HashMap, HashSet};

use super::{HarnessError, Result, RunRecord};
use crate::algorithm::Checkpoint;
use crate::metrics::{friedman_average_rank, Better};

/// Mean, population standard deviation and median of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats {
    pub mean: f64,
    pub std_pop: f64,
    pub median: f64,
}

impl MetricStats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std_pop: var.sqrt(),
            median: median(values),
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One (instance, task) row of a metric table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    /// 1-based.
    pub task: usize,
    /// Indexed like `Summary::algorithms`.
    pub stats: Vec<MetricStats>,
    pub best: usize,
    pub second: Option<usize>,
}

/// Convergence of the repetition with the median final IGD on one task.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianTrace {
    pub instance: String,
    pub algorithm: String,
    pub task: usize,
    pub repetition: usize,
    /// (evaluations, igd, hv)
    pub points: Vec<(u64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub instances: Vec<String>,
    pub algorithms: Vec<String>,
    pub igd: Vec<SummaryRow>,
    pub hv: Vec<SummaryRow>,
    /// Average Friedman rank of each algorithm over the medians of all
    /// (instance, task) cells.
    pub friedman_igd: Vec<f64>,
    pub friedman_hv: Vec<f64>,
    pub median_traces: Vec<MedianTrace>,
}

fn ranked(stats: &[MetricStats], better: Better) -> (usize, Option<usize>) {
    let mut order: Vec<usize> = (0..stats.len()).collect();
    order.sort_by(|&a, &b| {
        let c = stats[a].mean.total_cmp(&stats[b].mean);
        let c = if better == Better::Higher { c.reverse() } else { c };
        c.then(a.cmp(&b))
    });
    (order[0], order.get(1).copied())
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    items
        .filter(|s| seen.insert(*s))
        .map(str::to_string)
        .collect()
}

fn final_values(cp: &Checkpoint, task: usize, igd: bool) -> f64 {
    if igd {
        cp.igd[task]
    } else {
        cp.hv[task]
    }
}

/// Groups records by (instance, task, algorithm) and reduces them to the
/// summary tables. Instances and algorithms keep first-appearance order.
pub fn summarize(records: &[RunRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let instances = first_seen(records.iter().map(|r| r.instance.as_str()));
    let algorithms = first_seen(records.iter().map(|r| r.algorithm.as_str()));

    let mut tasks: HashMap<&str, usize> = HashMap::new();
    let mut groups: HashMap<(&str, &str), Vec<&RunRecord>> = HashMap::new();
    let mut keys = HashSet::new();
    for r in records {
        if r.checkpoints.is_empty() {
            return Err(HarnessError::Inconsistent(format!(
                "{}/{}/rep{} has no checkpoints",
                r.instance, r.algorithm, r.repetition
            )));
        }
        if !keys.insert((r.instance.as_str(), r.algorithm.as_str(), r.repetition)) {
            return Err(HarnessError::Inconsistent(format!(
                "duplicate run {}/{}/rep{}",
                r.instance, r.algorithm, r.repetition
            )));
        }
        let k = r.final_checkpoint().igd.len();
        if r.checkpoints.iter().any(|c| c.igd.len() != k || c.hv.len() != k) {
            return Err(HarnessError::Inconsistent(format!(
                "{}/{}/rep{} mixes task counts",
                r.instance, r.algorithm, r.repetition
            )));
        }
        if *tasks.entry(&r.instance).or_insert(k) != k {
            return Err(HarnessError::Inconsistent(format!(
                "instance {} appears with different task counts",
                r.instance
            )));
        }
        groups.entry((&r.instance, &r.algorithm)).or_default().push(r);
    }
    for i in &instances {
        for a in &algorithms {
            if !groups.contains_key(&(i.as_str(), a.as_str())) {
                return Err(HarnessError::Inconsistent(format!("no runs of {a} on {i}")));
            }
        }
    }

    let mut igd_rows = Vec::new();
    let mut hv_rows = Vec::new();
    let mut median_traces = Vec::new();
    for i in &instances {
        for t in 0..tasks[i.as_str()] {
            for (is_igd, rows) in [(true, &mut igd_rows), (false, &mut hv_rows)] {
                let stats: Vec<MetricStats> = algorithms
                    .iter()
                    .map(|a| {
                        let values: Vec<f64> = groups[&(i.as_str(), a.as_str())]
                            .iter()
                            .map(|r| final_values(r.final_checkpoint(), t, is_igd))
                            .collect();
                        MetricStats::of(&values)
                    })
                    .collect();
                let better = if is_igd { Better::Lower } else { Better::Higher };
                let (best, second) = ranked(&stats, better);
                rows.push(SummaryRow {
                    instance: i.clone(),
                    task: t + 1,
                    stats,
                    best,
                    second,
                });
            }
            for a in &algorithms {
                let mut runs = groups[&(i.as_str(), a.as_str())].clone();
                runs.sort_by(|x, y| {
                    x.final_checkpoint().igd[t]
                        .total_cmp(&y.final_checkpoint().igd[t])
                        .then(x.repetition.cmp(&y.repetition))
                });
                let chosen = runs[(runs.len() - 1) / 2];
                median_traces.push(MedianTrace {
                    instance: i.clone(),
                    algorithm: a.clone(),
                    task: t + 1,
                    repetition: chosen.repetition,
                    points: chosen
                        .checkpoints
                        .iter()
                        .map(|c| (c.evaluations, c.igd[t], c.hv[t]))
                        .collect(),
                });
            }
        }
    }

    let medians = |rows: &[SummaryRow]| -> Vec<Vec<f64>> {
        (0..algorithms.len())
            .map(|a| rows.iter().map(|r| r.stats[a].median).collect())
            .collect()
    };
    let rank = |rows: &[SummaryRow], better| {
        if algorithms.len() == 1 {
            return Ok(vec![1.0]);
        }
        friedman_average_rank(&medians(rows), better).map_err(|e| HarnessError::Inconsistent(e.to_string()))
    };
    let friedman_igd = rank(&igd_rows, Better::Lower)?;
    let friedman_hv = rank(&hv_rows, Better::Higher)?;

    Ok(Summary {
        instances,
        algorithms,
        igd: igd_rows,
        hv: hv_rows,
        friedman_igd,
        friedman_hv,
        median_traces,
    })
}
