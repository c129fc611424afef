#![allow(dead_code)]

use std::collections::HashSet;

use mtea_core::algorithm::{AlgorithmConfig, ExternalNeighborhood, Mode, Optimizer, RunStats};
use mtea_core::decomposition::asf;
use mtea_core::problems::InstanceDefinition;

/// What a fully instrumented run observed.
#[derive(Debug, Default)]
pub struct InvariantReport {
    pub steps: u64,
    pub budget_mismatches: u64,
    pub invalid_external_sets: u64,
    pub stale_caches: u64,
    pub asf_regressions: u64,
    pub unfair_generations: u64,
    pub external_set_changes: u64,
    pub stats: RunStats,
    pub final_population: Vec<Vec<Vec<f64>>>,
}

impl InvariantReport {
    pub fn violations(&self) -> u64 {
        self.budget_mismatches
            + self.invalid_external_sets
            + self.stale_caches
            + self.asf_regressions
            + self.unfair_generations
    }
}

fn external_snapshot(opt: &Optimizer<'_>) -> Vec<(Option<usize>, ExternalNeighborhood)> {
    opt.state()
        .tasks
        .iter()
        .flat_map(|p| p.subproblems.iter().map(|s| (s.external_task, s.external)))
        .collect()
}

/// Runs `mode` on `instance` for `budget` evaluations, checking every
/// invariant after each update.
pub fn instrumented_run(
    instance: &InstanceDefinition,
    config: AlgorithmConfig,
    budget: u64,
    seed: u64,
) -> InvariantReport {
    let mut opt = Optimizer::initialize(instance, config, budget, seed).unwrap();
    let k = instance.task_count();
    let n = config.population_size;
    let t = config.neighborhood_size;
    let mut report = InvariantReport::default();
    let mut ideals: Vec<Vec<f64>> = opt.state().tasks.iter().map(|p| p.ideal.values().to_vec()).collect();
    let scalar = |opt: &Optimizer<'_>| -> Vec<Vec<f64>> {
        opt.state()
            .tasks
            .iter()
            .map(|p| {
                p.subproblems
                    .iter()
                    .map(|s| asf(&s.objectives, &s.weight, p.ideal.values()))
                    .collect()
            })
            .collect()
    };
    let mut values = scalar(&opt);
    let mut externals = external_snapshot(&opt);
    loop {
        let mut seen = HashSet::new();
        let more = opt
            .run_generation_observed(&mut |o| {
                report.steps += 1;
                seen.insert(o.last_member().unwrap());
                let st = o.state();
                if st.budget.consumed() != (k * n) as u64 + report.steps {
                    report.budget_mismatches += 1;
                }
                for (task, pop) in st.tasks.iter().enumerate() {
                    let def = &o.instance().tasks()[task];
                    for (i, sp) in pop.subproblems.iter().enumerate() {
                        if def.objectives(&sp.individual) != sp.objectives {
                            report.stale_caches += 1;
                        }
                        let valid = match (sp.external_task, sp.external) {
                            (None, ExternalNeighborhood::All) => k == 1,
                            (Some(phi), ExternalNeighborhood::All) => phi != task && phi < k,
                            (Some(phi), ExternalNeighborhood::Anchored(a)) => {
                                phi != task
                                    && a < n
                                    && st.external_indices(task, i).unwrap() == st.tasks[phi].subproblems[a].internal
                                    && st.tasks[phi].subproblems[a].internal.len() == t
                            }
                            _ => false,
                        };
                        if !valid {
                            report.invalid_external_sets += 1;
                        }
                    }
                }
                let now = scalar(o);
                for (task, pop) in st.tasks.iter().enumerate() {
                    if pop.ideal.values() == ideals[task].as_slice() {
                        for (a, b) in now[task].iter().zip(&values[task]) {
                            if a > b {
                                report.asf_regressions += 1;
                            }
                        }
                    }
                    ideals[task] = pop.ideal.values().to_vec();
                }
                values = now;
                let ext = external_snapshot(o);
                if ext != externals {
                    report.external_set_changes += 1;
                    externals = ext;
                }
            })
            .unwrap();
        if !more {
            break;
        }
        if seen.len() != k * n {
            report.unfair_generations += 1;
        }
    }
    if opt.stats().evaluations_per_task.iter().sum::<u64>() != opt.state().budget.consumed() {
        report.budget_mismatches += 1;
    }
    report.stats = opt.stats().clone();
    report.final_population = opt.state().tasks.iter().map(|p| p.decisions()).collect();
    report
}

pub fn preset(mode: Mode) -> AlgorithmConfig {
    AlgorithmConfig::preset(mode)
}
