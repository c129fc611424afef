use super::state::{ExternalNeighborhood, MultitaskState, SubproblemState, TaskPopulation};
use super::{AlgorithmConfig, AlgorithmError, Mode};
use crate::decomposition::{asf, build_internal_neighborhood, generate_weight_vectors};
use crate::gra::{argmax_relational, grey_relational_degree, neighborhood_mean, SequenceSet};
use crate::metrics::{FrontEvaluator, IgdForm, MetricError};
use crate::problems::{evaluate_task, true_front_sample, InstanceDefinition, ProblemError, TaskDefinition};
use crate::space::{EvalBudget, IdealPoint, RngStream, UnifiedVector};
use crate::variation::reproduce;

/// How checkpoints are scored.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSettings {
    /// Points sampled from each analytic front.
    pub reference_size: usize,
    /// Hypervolume reference point in normalized objective space.
    pub hv_reference: Vec<f64>,
    pub igd_form: IgdForm,
    /// Evaluations between snapshots.
    pub checkpoint_interval: u64,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self {
            reference_size: 1000,
            hv_reference: vec![1.0, 1.0],
            igd_form: IgdForm::Printed,
            checkpoint_interval: 1000,
        }
    }
}

impl MetricSettings {
    pub fn evaluators(&self, instance: &InstanceDefinition) -> Result<Vec<FrontEvaluator>, MetricError> {
        instance
            .tasks()
            .iter()
            .map(|t| {
                FrontEvaluator::new(
                    &true_front_sample(t, self.reference_size),
                    self.hv_reference.clone(),
                    self.igd_form,
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub evaluations: u64,
    pub igd: Vec<f64>,
    pub hv: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub generations: u64,
    pub whole_selections: u64,
    pub internal_selections: u64,
    pub external_selections: u64,
    /// External offspring redirected to the current task's internal neighborhood.
    pub redirected_updates: u64,
    pub external_resets: u64,
    pub external_retargets: u64,
    pub replacements: u64,
    pub evaluations_per_task: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub checkpoints: Vec<Checkpoint>,
    /// Per task, the non-dominated objective vectors of the final sub-population.
    pub final_fronts: Vec<Vec<Vec<f64>>>,
    /// Per task, the unified decision vectors of the final sub-population.
    pub final_populations: Vec<Vec<Vec<f64>>>,
    pub stats: RunStats,
    pub igd_form: IgdForm,
}

/// Outcome of candidate set selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub target: usize,
    pub pool: Vec<usize>,
    pub used_external: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateOutcome {
    /// Task the offspring was evaluated on.
    pub evaluated_on: usize,
    /// Subproblems of that task whose individual was replaced.
    pub replaced: Vec<usize>,
}

/// One optimization run over an instance.
pub struct Optimizer<'a> {
    instance: &'a InstanceDefinition,
    config: AlgorithmConfig,
    state: MultitaskState,
    stats: RunStats,
    last_member: Option<(usize, usize)>,
}

impl<'a> Optimizer<'a> {
    /// Builds weights and neighborhoods, samples and evaluates the initial
    /// sub-populations (charging `K * N` evaluations) and sets ideal points.
    pub fn initialize(
        instance: &'a InstanceDefinition,
        config: AlgorithmConfig,
        budget: u64,
        seed: u64,
    ) -> Result<Self, AlgorithmError> {
        config.validate()?;
        let k = instance.task_count();
        let n = config.population_size;
        let needed = (k * n) as u64;
        if budget < needed {
            return Err(AlgorithmError::BudgetTooSmall {
                needed,
                available: budget,
            });
        }
        let mut budget = EvalBudget::new(budget)?;
        let mut rng = RngStream::new(seed);
        let dimension = instance.unified_dimension();
        let mut tasks = Vec::with_capacity(k);
        for (task_index, task) in instance.tasks().iter().enumerate() {
            let weights = generate_weight_vectors(n, task.space().objectives())?;
            let neighborhoods = build_internal_neighborhood(&weights, config.neighborhood_size)?;
            let mut subproblems = Vec::with_capacity(n);
            for (weight, internal) in weights.into_iter().zip(neighborhoods) {
                let external_task = other_task(&mut rng, k, task_index);
                let individual = UnifiedVector::random(dimension, &mut rng);
                let objectives = evaluate_task(task, &individual, &mut budget)?;
                subproblems.push(SubproblemState {
                    weight,
                    internal,
                    external_task,
                    external: ExternalNeighborhood::All,
                    individual,
                    objectives,
                });
            }
            let mut ideal = IdealPoint::unset(task.space().objectives());
            for sp in &subproblems {
                ideal.update(&sp.objectives)?;
            }
            tasks.push(TaskPopulation { subproblems, ideal });
        }
        let stats = RunStats {
            evaluations_per_task: vec![n as u64; k],
            ..RunStats::default()
        };
        Ok(Self {
            instance,
            config,
            state: MultitaskState {
                tasks,
                budget,
                rng,
                generation: 0,
            },
            stats,
            last_member: None,
        })
    }

    pub fn state(&self) -> &MultitaskState {
        &self.state
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    /// The (task, subproblem) pair processed by the most recent step.
    pub fn last_member(&self) -> Option<(usize, usize)> {
        self.last_member
    }

    pub fn config(&self) -> &AlgorithmConfig {
        &self.config
    }

    pub fn instance(&self) -> &InstanceDefinition {
        self.instance
    }

    /// Picks the task and index set that supply the difference vectors.
    pub fn candidate_set_selection(&mut self, cur: usize, tau: usize) -> Selection {
        let n = self.config.population_size;
        let whole = Selection {
            target: cur,
            pool: (0..n).collect(),
            used_external: false,
        };
        if self.state.rng.uniform() >= self.config.beta {
            self.stats.whole_selections += 1;
            return whole;
        }
        let has_external = self.state.tasks[cur].subproblems[tau].external_task.is_some();
        let external = match self.config.mode {
            Mode::Dual => self.state.rng.coin() && has_external,
            Mode::ExternalOnly => has_external,
            Mode::InternalOnly | Mode::MoeadBaseline => false,
        };
        if external {
            self.stats.external_selections += 1;
            let sp = &self.state.tasks[cur].subproblems[tau];
            Selection {
                target: sp.external_task.expect("checked above"),
                pool: self
                    .state
                    .external_indices(cur, tau)
                    .expect("external task exists"),
                used_external: true,
            }
        } else {
            self.stats.internal_selections += 1;
            Selection {
                target: cur,
                pool: self.state.tasks[cur].subproblems[tau].internal.clone(),
                used_external: false,
            }
        }
    }

    /// Offspring of `x` with its difference pair drawn from the selected pool.
    pub fn reproduce(&mut self, x: &UnifiedVector, selection: &Selection) -> Result<UnifiedVector, AlgorithmError> {
        let population = &self.state.tasks[selection.target].subproblems;
        let candidates: Vec<&UnifiedVector> = selection
            .pool
            .iter()
            .map(|&q| &population[q].individual)
            .collect();
        Ok(reproduce(x, &candidates, &self.config.variation, &mut self.state.rng)?)
    }

    /// Evaluates the offspring, replaces the subproblems it improves and
    /// adapts the external neighborhood. Returns `None` once the budget is
    /// exhausted (the state is left untouched in that case).
    pub fn update(
        &mut self,
        cur: usize,
        tau: usize,
        offspring: UnifiedVector,
        selection: Selection,
    ) -> Result<Option<UpdateOutcome>, AlgorithmError> {
        let Selection {
            target: mut tar,
            pool: mut q,
            ..
        } = selection;

        if cur != tar && self.config.mode == Mode::Dual && self.state.rng.coin() {
            q = self.state.tasks[cur].subproblems[tau].internal.clone();
            tar = cur;
            self.stats.redirected_updates += 1;
        }

        let task = &self.instance.tasks()[tar];
        let f = match evaluate_task(task, &offspring, &mut self.state.budget) {
            Ok(f) => f,
            Err(ProblemError::BudgetExceeded) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        self.stats.evaluations_per_task[tar] += 1;
        let population = &mut self.state.tasks[tar];
        population.ideal.update(&f)?;

        let cap = match self.config.mode {
            Mode::MoeadBaseline => {
                self.state.rng.shuffle(&mut q);
                self.config.replacement_cap.unwrap_or(usize::MAX)
            }
            _ => usize::MAX,
        };
        let z = population.ideal.values();
        let mut replaced = Vec::new();
        for &i in &q {
            if replaced.len() >= cap {
                break;
            }
            let sp = &mut population.subproblems[i];
            if asf(&f, &sp.weight, z) < asf(&sp.objectives, &sp.weight, z) {
                sp.individual = offspring.clone();
                sp.objectives = f.clone();
                replaced.push(i);
            }
        }
        self.stats.replacements += replaced.len() as u64;

        if cur != tar {
            self.adapt_external(cur, tau, tar, &replaced)?;
        }
        Ok(Some(UpdateOutcome {
            evaluated_on: tar,
            replaced,
        }))
    }

    fn adapt_external(&mut self, cur: usize, tau: usize, tar: usize, replaced: &[usize]) -> Result<(), AlgorithmError> {
        if replaced.is_empty() {
            let k = self.state.tasks.len();
            let next = other_task(&mut self.state.rng, k, cur);
            let sp = &mut self.state.tasks[cur].subproblems[tau];
            sp.external_task = next;
            sp.external = ExternalNeighborhood::All;
            self.stats.external_resets += 1;
            return Ok(());
        }
        let current = &self.state.tasks[cur].subproblems;
        let target = &self.state.tasks[tar].subproblems;
        let reference = neighborhood_mean(&current[tau].internal, |i| &current[i].individual)?;
        let compared = replaced
            .iter()
            .map(|&a| neighborhood_mean(&target[a].internal, |i| &target[i].individual))
            .collect::<Result<Vec<_>, _>>()?;
        let degrees = grey_relational_degree(&SequenceSet::new(reference, compared, self.config.rho)?);
        let anchor = replaced[argmax_relational(&degrees)];
        self.state.tasks[cur].subproblems[tau].external = ExternalNeighborhood::Anchored(anchor);
        self.stats.external_retargets += 1;
        Ok(())
    }

    /// Selection, reproduction and update for subproblem `tau` of task `cur`.
    /// Returns `false` when the budget ran out.
    pub fn step(&mut self, cur: usize, tau: usize) -> Result<bool, AlgorithmError> {
        if self.state.budget.is_exhausted() {
            return Ok(false);
        }
        let selection = self.candidate_set_selection(cur, tau);
        let x = self.state.tasks[cur].subproblems[tau].individual.clone();
        let offspring = self.reproduce(&x, &selection)?;
        Ok(self.update(cur, tau, offspring, selection)?.is_some())
    }

    pub fn run_generation(&mut self) -> Result<bool, AlgorithmError> {
        self.run_generation_observed(&mut |_| {})
    }

    /// One pass over the shuffled union of all sub-populations, calling
    /// `observer` after every update. Members are read from the live state,
    /// so earlier replacements are visible to later members. Returns `false`
    /// if the budget ran out before the pass completed.
    pub fn run_generation_observed(
        &mut self,
        observer: &mut dyn FnMut(&Optimizer<'_>),
    ) -> Result<bool, AlgorithmError> {
        if self.state.budget.is_exhausted() {
            return Ok(false);
        }
        let mut joint: Vec<(usize, usize)> = self
            .state
            .tasks
            .iter()
            .enumerate()
            .flat_map(|(k, p)| (0..p.subproblems.len()).map(move |i| (k, i)))
            .collect();
        self.state.rng.shuffle(&mut joint);
        for (cur, tau) in joint {
            if !self.step(cur, tau)? {
                return Ok(false);
            }
            self.last_member = Some((cur, tau));
            observer(self);
        }
        self.state.generation += 1;
        self.stats.generations += 1;
        Ok(true)
    }
}

/// Uniform draw from `0..k` excluding `own`; `None` when `k == 1`.
fn other_task(rng: &mut RngStream, k: usize, own: usize) -> Option<usize> {
    if k < 2 {
        return None;
    }
    let pick = rng.below(k - 1);
    Some(if pick >= own { pick + 1 } else { pick })
}

struct Recorder {
    evaluators: Vec<FrontEvaluator>,
    interval: u64,
    next_mark: u64,
    checkpoints: Vec<Checkpoint>,
    error: Option<MetricError>,
}

impl Recorder {
    fn observe(&mut self, opt: &Optimizer<'_>) {
        let consumed = opt.state.budget.consumed();
        if consumed >= self.next_mark {
            self.snapshot(opt);
            while self.next_mark <= consumed {
                self.next_mark += self.interval;
            }
        }
    }

    fn snapshot(&mut self, opt: &Optimizer<'_>) {
        let mut igd = Vec::new();
        let mut hv = Vec::new();
        for (population, evaluator) in opt.state.tasks.iter().zip(&self.evaluators) {
            match evaluator.score(&population.objectives()) {
                Ok((_, i, h)) => {
                    igd.push(i);
                    hv.push(h);
                }
                Err(e) => {
                    self.error.get_or_insert(e);
                    return;
                }
            }
        }
        self.checkpoints.push(Checkpoint {
            evaluations: opt.state.budget.consumed(),
            igd,
            hv,
        });
    }
}

/// Runs `instance` until `budget` evaluations are spent, recording metric
/// snapshots every `metrics.checkpoint_interval` evaluations and at the end.
pub fn run(
    instance: &InstanceDefinition,
    config: &AlgorithmConfig,
    budget: u64,
    metrics: &MetricSettings,
    seed: u64,
) -> Result<RunTrace, AlgorithmError> {
    config.validate()?;
    if metrics.checkpoint_interval == 0 {
        return Err(AlgorithmError::InvalidConfig("checkpoint interval must be positive".into()));
    }
    let evaluators = metrics.evaluators(instance)?;
    let mut opt = Optimizer::initialize(instance, *config, budget, seed)?;
    let mut recorder = Recorder {
        evaluators,
        interval: metrics.checkpoint_interval,
        next_mark: metrics.checkpoint_interval,
        checkpoints: Vec::new(),
        error: None,
    };
    recorder.observe(&opt);
    while opt.run_generation_observed(&mut |o| recorder.observe(o))? {}
    if recorder.checkpoints.last().map(|c| c.evaluations) != Some(opt.state.budget.consumed()) {
        recorder.snapshot(&opt);
    }
    if let Some(e) = recorder.error {
        return Err(e.into());
    }
    let mut final_fronts = Vec::new();
    for (population, evaluator) in opt.state.tasks.iter().zip(&recorder.evaluators) {
        final_fronts.push(evaluator.score(&population.objectives())?.0);
    }
    Ok(RunTrace {
        checkpoints: recorder.checkpoints,
        final_fronts,
        final_populations: opt.state.tasks.iter().map(TaskPopulation::decisions).collect(),
        stats: opt.stats,
        igd_form: metrics.igd_form,
    })
}

/// Single-task decomposition baseline on `task` with its own budget share.
pub fn run_moead_baseline(
    task: &TaskDefinition,
    config: &AlgorithmConfig,
    budget: u64,
    metrics: &MetricSettings,
    seed: u64,
) -> Result<RunTrace, AlgorithmError> {
    if config.mode != Mode::MoeadBaseline {
        return Err(AlgorithmError::InvalidConfig(format!(
            "baseline runs need mode {}, got {}",
            Mode::MoeadBaseline,
            config.mode
        )));
    }
    let instance = InstanceDefinition::single_task("baseline", task.clone());
    run(&instance, config, budget, metrics, seed)
}
