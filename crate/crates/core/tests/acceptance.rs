//! End-to-end acceptance checks. Runs without the libtest harness so every
//! check prints one PASS/FAIL line; pass check numbers as arguments to run a
//! subset.

mod common;

use std::time::{Duration, Instant};

use mtea_core::algorithm::{run, AlgorithmConfig, MetricSettings, Mode};
use mtea_core::gra::{grey_relational_degree, SequenceSet};
use mtea_core::harness::{parse_config_str, run_experiment, Summary};
use mtea_core::metrics::{hv_2d, igd_with, IgdForm};
use mtea_core::problems::{build_builtin_suite, evaluate_task, true_front_sample};
use mtea_core::space::EvalBudget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const ROOT_SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gra_oracle(rho: f64, reference: &[f64], compared: &[Vec<f64>]) -> Vec<f64> {
    let deltas: Vec<Vec<f64>> = compared
        .iter()
        .map(|x| reference.iter().zip(x).map(|(y, v)| (y - v).abs()).collect())
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in &deltas {
        for &d in row {
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    deltas
        .iter()
        .map(|row| {
            let mut total = 0.0;
            for &d in row {
                let den = d + rho * hi;
                total += if den == 0.0 { 1.0 } else { (lo + rho * hi) / den };
            }
            total / row.len() as f64
        })
        .collect()
}

fn check_gra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let len = rng.gen_range(1..=8);
        let count = rng.gen_range(1..=5);
        let rho = [0.1, 0.5, 0.9][case % 3];
        let mut seq = || (0..len).map(|_| rng.gen::<f64>()).collect::<Vec<f64>>();
        let reference = seq();
        let compared: Vec<Vec<f64>> = (0..count).map(|_| seq()).collect();
        let expected = gra_oracle(rho, &reference, &compared);
        let got = grey_relational_degree(&SequenceSet::new(reference, compared, rho).unwrap());
        for (a, b) in got.iter().zip(&expected) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |error| {worst:.2e} over 1000 sets"))
}

fn igd_oracle(approx: &[Vec<f64>], reference: &[Vec<f64>], mean_form: bool) -> f64 {
    let mut acc = 0.0;
    for p in reference {
        let mut best = f64::INFINITY;
        for a in approx {
            let mut s = 0.0;
            for k in 0..p.len() {
                s += (p[k] - a[k]).powi(2);
            }
            best = best.min(s.sqrt());
        }
        acc += if mean_form { best } else { best * best };
    }
    if mean_form {
        acc / reference.len() as f64
    } else {
        acc.sqrt() / reference.len() as f64
    }
}

fn hv_inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut corner = [f64::NEG_INFINITY; 2];
        for (i, p) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                corner[0] = corner[0].max(p[0]);
                corner[1] = corner[1].max(p[1]);
            }
        }
        let area = (reference[0] - corner[0]).max(0.0) * (reference[1] - corner[1]).max(0.0);
        total += if mask.count_ones() % 2 == 1 { area } else { -area };
    }
    total
}

fn hv_monte_carlo(points: &[Vec<f64>], samples: u64, seed: u64) -> (f64, f64) {
    // prefix minimum of f2 over points sorted by f1 answers "is s dominated"
    let mut sorted: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = sorted.iter().map(|p| p.0).collect();
    let mut floor = Vec::with_capacity(sorted.len());
    let mut m = f64::INFINITY;
    for p in &sorted {
        m = m.min(p.1);
        floor.push(m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let s0: f64 = rng.gen();
        let s1: f64 = rng.gen();
        let idx = xs.partition_point(|&x| x <= s0);
        if idx > 0 && floor[idx - 1] <= s1 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

fn random_front(rng: &mut ChaCha8Rng, max: usize) -> Vec<Vec<f64>> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect()
}

fn check_metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut igd_err: f64 = 0.0;
    for _ in 0..500 {
        let dims = rng.gen_range(2..=3);
        let mut front = |max: usize| -> Vec<Vec<f64>> {
            let n = rng.gen_range(1..=max);
            (0..n).map(|_| (0..dims).map(|_| rng.gen::<f64>()).collect()).collect()
        };
        let approx = front(20);
        let reference = front(20);
        for (form, mean) in [(IgdForm::Printed, false), (IgdForm::Mean, true)] {
            let got = igd_with(&approx, &reference, form).unwrap();
            igd_err = igd_err.max((got - igd_oracle(&approx, &reference, mean)).abs());
        }
    }
    let mut ie_err: f64 = 0.0;
    for _ in 0..500 {
        let front: Vec<Vec<f64>> = random_front(&mut rng, 4).into_iter().map(|p| p.iter().map(|v| v * 1.2).collect()).collect();
        let got = hv_2d(&front, &[1.0, 1.0]).unwrap();
        ie_err = ie_err.max((got - hv_inclusion_exclusion(&front, &[1.0, 1.0])).abs());
    }
    let fronts: Vec<Vec<Vec<f64>>> = (0..50).map(|_| random_front(&mut rng, 15)).collect();
    let z_scores: Vec<f64> = fronts
        .par_iter()
        .enumerate()
        .map(|(i, front)| {
            let exact = hv_2d(front, &[1.0, 1.0]).unwrap();
            let (estimate, se) = hv_monte_carlo(front, 10_000_000, 1000 + i as u64);
            if se == 0.0 {
                if (exact - estimate).abs() < 1e-12 { 0.0 } else { f64::INFINITY }
            } else {
                (exact - estimate).abs() / se
            }
        })
        .collect();
    let worst_z = z_scores.iter().copied().fold(0.0, f64::max);
    outcome(
        igd_err <= 1e-12 && ie_err <= 1e-9 && worst_z <= 3.0,
        format!("igd max |error| {igd_err:.2e}; hv inclusion-exclusion max |error| {ie_err:.2e}; hv monte-carlo max z {worst_z:.2}"),
    )
}

fn check_invariants() -> Outcome {
    let suite = build_builtin_suite();
    let instances = [&suite[0], &suite[5], &suite[7]];
    let modes = [(Mode::Dual, 0.1), (Mode::Dual, 0.8), (Mode::InternalOnly, 0.8), (Mode::ExternalOnly, 0.5)];
    let mut problems = Vec::new();
    for seed in 0..20u64 {
        let inst = instances[seed as usize % 3];
        let (mode, beta) = modes[seed as usize % 4];
        let cfg = AlgorithmConfig { beta, ..AlgorithmConfig::preset(mode) };
        let report = common::instrumented_run(inst, cfg, 3000, seed);
        if report.violations() > 0 {
            problems.push(format!("{} {mode} seed {seed}: {report:?}", inst.name()));
        }
        if mode == Mode::InternalOnly && (report.stats.external_selections > 0 || report.external_set_changes > 0) {
            problems.push(format!("{} internal-only seed {seed} used the external neighborhood", inst.name()));
        }
        let settings = MetricSettings { checkpoint_interval: 500, ..MetricSettings::default() };
        let a = run(inst, &cfg, 3000, &settings, seed).unwrap();
        let b = run(inst, &cfg, 3000, &settings, seed).unwrap();
        if format!("{a:?}") != format!("{b:?}") {
            problems.push(format!("{} {mode} seed {seed} is not reproducible", inst.name()));
        }
    }
    let detail = if problems.is_empty() {
        "20 instrumented runs on CIHS, PILS, NIMS without violations".to_string()
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn experiment(instances: &[&str], algorithms: &[(&str, Option<(Mode, f64)>)], reps: usize) -> Summary {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = format!(
        "[experiment]\ninstances = {instances:?}\nalgorithms = {:?}\nrepetitions = {reps}\nroot_seed = {ROOT_SEED}\n\
         budget_per_task = 20000\ncheckpoint_interval = 1000\noutput_dir = \"out\"\n",
        algorithms.iter().map(|a| a.0).collect::<Vec<_>>()
    );
    for (label, custom) in algorithms {
        if let Some((mode, beta)) = custom {
            text.push_str(&format!("[algorithms.{label}]\nmode = \"{mode}\"\nbeta = {beta:?}\n"));
        }
    }
    let config = parse_config_str(&text, tmp.path()).unwrap();
    run_experiment(&config).unwrap().summary
}

fn medians(summary: &Summary, algorithm: usize) -> Vec<f64> {
    summary.igd.iter().map(|r| r.stats[algorithm].median).collect()
}

fn check_baseline_ordering() -> Outcome {
    let s = experiment(&["CIHS", "CIMS", "CILS"], &[("dual", None), ("moead-baseline", None)], 11);
    let (dn, base) = (medians(&s, 0), medians(&s, 1));
    let wins = dn.iter().zip(&base).filter(|(a, b)| a <= b).count();
    let cells: Vec<String> = s
        .igd
        .iter()
        .zip(dn.iter().zip(&base))
        .map(|(r, (a, b))| format!("{}{} {a:.3e}/{b:.3e}", r.instance, r.task))
        .collect();
    outcome(wins >= 5, format!("dual median <= baseline median in {wins}/6 cells [{}]", cells.join(", ")))
}

fn check_ablation_ranks() -> Outcome {
    let names = ["CIHS", "CIMS", "CILS", "PIHS", "PIMS", "PILS", "NIHS", "NIMS", "NILS"];
    let s = experiment(&names, &[("dual", None), ("internal-only", None), ("external-only", None)], 11);
    let r = &s.friedman_igd;
    outcome(
        r[0] < r[1] && r[0] < r[2],
        format!("average ranks dual {:.3}, internal-only {:.3}, external-only {:.3}", r[0], r[1], r[2]),
    )
}

fn check_attainability() -> Outcome {
    let mut worst: f64 = 0.0;
    for inst in build_builtin_suite() {
        for task in inst.tasks() {
            let front = true_front_sample(task, 100);
            let mut budget = EvalBudget::new(100).unwrap();
            for p in &front {
                let x = task.optimal_decision(p[0], inst.unified_dimension());
                let f = evaluate_task(task, &x, &mut budget).unwrap();
                worst = worst.max((f[0] - p[0]).abs()).max((f[1] - p[1]).abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max deviation {worst:.2e} over 18 tasks x 100 points"))
}

fn check_beta_sensitivity() -> Outcome {
    let s = experiment(
        &["CIHS"],
        &[
            ("beta-00", Some((Mode::Dual, 0.0))),
            ("beta-02", Some((Mode::Dual, 0.2))),
            ("beta-08", Some((Mode::Dual, 0.8))),
        ],
        7,
    );
    let (b0, b2, b8) = (medians(&s, 0), medians(&s, 1), medians(&s, 2));
    let ok = (0..b2.len()).all(|t| b2[t] <= b0[t] && b2[t] <= b8[t]);
    let cells: Vec<String> = (0..b2.len())
        .map(|t| format!("task {}: {:.4e} / {:.4e} / {:.4e}", t + 1, b0[t], b2[t], b8[t]))
        .collect();
    outcome(ok, format!("median igd at beta 0.0 / 0.2 / 0.8 [{}]", cells.join("; ")))
}

type Check = (usize, &'static str, Duration, fn() -> Outcome);

fn main() {
    let checks: [Check; 7] = [
        (1, "gra-oracle", Duration::from_secs(1), check_gra),
        (2, "metric-oracles", Duration::from_secs(120), check_metrics),
        (3, "algorithm-invariants", Duration::from_secs(60), check_invariants),
        (4, "dual-vs-baseline", Duration::from_secs(600), check_baseline_ordering),
        (5, "ablation-ranks", Duration::from_secs(1800), check_ablation_ranks),
        (6, "front-attainability", Duration::from_secs(1), check_attainability),
        (7, "beta-sensitivity", Duration::from_secs(600), check_beta_sensitivity),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, limit, check) in checks {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= limit;
        if !pass {
            failed += 1;
        }
        println!(
            "acceptance {id} {name}: {} ({:.2} s, limit {} s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            result.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
