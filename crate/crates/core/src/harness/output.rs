use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::summary::{Summary, SummaryRow};
use super::{HarnessError, Result, RunRecord};
use crate::algorithm::Checkpoint;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn malformed(path: &Path, reason: impl Into<String>) -> HarnessError {
    HarnessError::Malformed {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()
        .map_err(csv_err(path))?;
    Ok((header, rows))
}

fn parse<T: std::str::FromStr>(path: &Path, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(path, format!("cannot parse {field:?}")))
}

fn strings(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn run_dir(root: &Path, instance: &str, algorithm: &str, repetition: usize) -> PathBuf {
    root.join("runs").join(instance).join(algorithm).join(format!("rep{repetition}"))
}

fn write_matrix(path: &Path, prefix: &str, rows: &[Vec<f64>], width: usize) -> Result<()> {
    write_csv(
        path,
        &strings(prefix, width),
        rows.iter().map(|r| r.iter().copied().map(num).collect()),
    )
}

/// Writes the convergence, front, population and meta files of one run.
pub fn write_run(root: &Path, record: &RunRecord, config_hash: &str) -> Result<()> {
    let dir = run_dir(root, &record.instance, &record.algorithm, record.repetition);
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let header: Vec<String> = ["evals", "task", "igd", "hv"].map(String::from).to_vec();
    let rows = record.checkpoints.iter().flat_map(|c| {
        (0..c.igd.len()).map(move |t| {
            vec![
                c.evaluations.to_string(),
                (t + 1).to_string(),
                num(c.igd[t]),
                num(c.hv[t]),
            ]
        })
    });
    write_csv(&dir.join("convergence.csv"), &header, rows)?;
    for (t, front) in record.final_fronts.iter().enumerate() {
        let width = front.first().map_or(2, Vec::len);
        write_matrix(&dir.join(format!("front_task{}.csv", t + 1)), "f", front, width)?;
    }
    for (t, pop) in record.final_populations.iter().enumerate() {
        let width = pop.first().map_or(0, Vec::len);
        write_matrix(&dir.join(format!("pop_task{}.csv", t + 1)), "x", pop, width)?;
    }
    let meta_header: Vec<String> = [
        "instance",
        "algorithm",
        "repetition",
        "seed",
        "wall_clock_seconds",
        "config_sha256",
    ]
    .map(String::from)
    .to_vec();
    write_csv(
        &dir.join("meta.csv"),
        &meta_header,
        [vec![
            record.instance.clone(),
            record.algorithm.clone(),
            record.repetition.to_string(),
            record.seed.to_string(),
            format!("{:.6e}", record.wall_clock_seconds),
            config_hash.to_string(),
        ]],
    )
}

pub(super) fn write_index(root: &Path, records: &[RunRecord]) -> Result<()> {
    let header: Vec<String> = ["instance", "algorithm", "repetition", "seed", "path"]
        .map(String::from)
        .to_vec();
    write_csv(
        &root.join("runs").join("index.csv"),
        &header,
        records.iter().map(|r| {
            vec![
                r.instance.clone(),
                r.algorithm.clone(),
                r.repetition.to_string(),
                r.seed.to_string(),
                format!("{}/{}/rep{}", r.instance, r.algorithm, r.repetition),
            ]
        }),
    )
}

pub fn read_front_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let (_, rows) = read_csv(path)?;
    rows.iter()
        .map(|row| row.iter().map(|f| parse(path, f)).collect())
        .collect()
}

fn read_convergence(path: &Path) -> Result<Vec<Checkpoint>> {
    let (header, rows) = read_csv(path)?;
    if header != ["evals", "task", "igd", "hv"] {
        return Err(malformed(path, format!("unexpected header {header:?}")));
    }
    let mut by_evals: BTreeMap<u64, Vec<(usize, f64, f64)>> = BTreeMap::new();
    for row in &rows {
        if row.len() != 4 {
            return Err(malformed(path, "expected 4 columns"));
        }
        by_evals.entry(parse(path, &row[0])?).or_default().push((
            parse(path, &row[1])?,
            parse(path, &row[2])?,
            parse(path, &row[3])?,
        ));
    }
    by_evals
        .into_iter()
        .map(|(evaluations, mut cells)| {
            cells.sort_by_key(|c| c.0);
            if cells.iter().enumerate().any(|(i, c)| c.0 != i + 1) {
                return Err(malformed(path, format!("tasks at {evaluations} are not 1..K")));
            }
            Ok(Checkpoint {
                evaluations,
                igd: cells.iter().map(|c| c.1).collect(),
                hv: cells.iter().map(|c| c.2).collect(),
            })
        })
        .collect()
}

/// Reads every run listed in `runs/index.csv` under `root`, in index order.
pub fn load_runs(root: &Path) -> Result<Vec<RunRecord>> {
    let index = root.join("runs").join("index.csv");
    let (header, rows) = read_csv(&index)?;
    if header != ["instance", "algorithm", "repetition", "seed", "path"] {
        return Err(malformed(&index, format!("unexpected header {header:?}")));
    }
    rows.iter()
        .map(|row| {
            if row.len() != 5 {
                return Err(malformed(&index, "expected 5 columns"));
            }
            let repetition: usize = parse(&index, &row[2])?;
            let dir = run_dir(root, &row[0], &row[1], repetition);
            let checkpoints = read_convergence(&dir.join("convergence.csv"))?;
            let tasks = checkpoints.last().map_or(0, |c| c.igd.len());
            let mut final_fronts = Vec::new();
            let mut final_populations = Vec::new();
            for t in 1..=tasks {
                final_fronts.push(read_front_csv(&dir.join(format!("front_task{t}.csv")))?);
                final_populations.push(read_front_csv(&dir.join(format!("pop_task{t}.csv")))?);
            }
            let meta_path = dir.join("meta.csv");
            let (_, meta) = read_csv(&meta_path)?;
            let meta = meta.first().filter(|m| m.len() == 6).ok_or_else(|| malformed(&meta_path, "expected one 6-column row"))?;
            Ok(RunRecord {
                instance: row[0].clone(),
                algorithm: row[1].clone(),
                repetition,
                seed: parse(&meta_path, &meta[3])?,
                checkpoints,
                final_fronts,
                final_populations,
                wall_clock_seconds: parse(&meta_path, &meta[4])?,
            })
        })
        .collect()
}

fn metric_table(path: &Path, algorithms: &[String], rows: &[SummaryRow]) -> Result<()> {
    let mut header: Vec<String> = vec!["instance".into(), "task".into()];
    for a in algorithms {
        header.extend([format!("{a}_mean"), format!("{a}_std_pop"), format!("{a}_median")]);
    }
    header.extend(["best".into(), "second".into()]);
    write_csv(
        path,
        &header,
        rows.iter().map(|r| {
            let mut out = vec![r.instance.clone(), r.task.to_string()];
            for s in &r.stats {
                out.extend([num(s.mean), num(s.std_pop), num(s.median)]);
            }
            out.push(algorithms[r.best].clone());
            out.push(r.second.map_or_else(String::new, |s| algorithms[s].clone()));
            out
        }),
    )
}

/// Writes `summary/{igd,hv,friedman,median_convergence}.csv` under `root`.
pub fn write_summary(root: &Path, summary: &Summary) -> Result<()> {
    let dir = root.join("summary");
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    metric_table(&dir.join("igd.csv"), &summary.algorithms, &summary.igd)?;
    metric_table(&dir.join("hv.csv"), &summary.algorithms, &summary.hv)?;
    let header: Vec<String> = ["algorithm", "igd_rank", "hv_rank", "cells"].map(String::from).to_vec();
    write_csv(
        &dir.join("friedman.csv"),
        &header,
        summary.algorithms.iter().enumerate().map(|(a, name)| {
            vec![
                name.clone(),
                num(summary.friedman_igd[a]),
                num(summary.friedman_hv[a]),
                summary.igd.len().to_string(),
            ]
        }),
    )?;
    let header: Vec<String> = ["instance", "algorithm", "task", "repetition", "evals", "igd", "hv"]
        .map(String::from)
        .to_vec();
    write_csv(
        &dir.join("median_convergence.csv"),
        &header,
        summary.median_traces.iter().flat_map(|t| {
            t.points.iter().map(move |&(e, igd, hv)| {
                vec![
                    t.instance.clone(),
                    t.algorithm.clone(),
                    t.task.to_string(),
                    t.repetition.to_string(),
                    e.to_string(),
                    num(igd),
                    num(hv),
                ]
            })
        }),
    )
}
