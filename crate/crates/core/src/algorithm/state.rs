use crate::space::{EvalBudget, IdealPoint, RngStream, UnifiedVector};

/// Where a subproblem's external neighborhood points in its external task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExternalNeighborhood {
    /// Every subproblem of the external task.
    All,
    /// The internal neighborhood of subproblem `a` of the external task.
    Anchored(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemState {
    pub weight: Vec<f64>,
    /// Internal neighborhood `B`, nearest first; contains the own index.
    pub internal: Vec<usize>,
    /// External task `φ`; `None` only when the instance has a single task.
    pub external_task: Option<usize>,
    pub external: ExternalNeighborhood,
    pub individual: UnifiedVector,
    /// Objectives of `individual` on the owning task.
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskPopulation {
    pub subproblems: Vec<SubproblemState>,
    pub ideal: IdealPoint,
}

impl TaskPopulation {
    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.subproblems.iter().map(|s| s.objectives.clone()).collect()
    }

    pub fn decisions(&self) -> Vec<Vec<f64>> {
        self.subproblems
            .iter()
            .map(|s| s.individual.values().to_vec())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct MultitaskState {
    pub tasks: Vec<TaskPopulation>,
    pub budget: EvalBudget,
    pub rng: RngStream,
    pub generation: u64,
}

impl MultitaskState {
    /// Concrete index set of a subproblem's external neighborhood.
    pub fn external_indices(&self, task: usize, subproblem: usize) -> Option<Vec<usize>> {
        let sp = &self.tasks[task].subproblems[subproblem];
        let target = sp.external_task?;
        Some(match sp.external {
            ExternalNeighborhood::All => (0..self.tasks[target].subproblems.len()).collect(),
            ExternalNeighborhood::Anchored(a) => self.tasks[target].subproblems[a].internal.clone(),
        })
    }
}
