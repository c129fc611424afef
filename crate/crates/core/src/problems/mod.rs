//! Two-objective benchmark tasks and multitasking instances.
//!
//! Every task has the form `f1 = y_1`, `f2 = g * h(f1, g)` with
//! `g = 1 + base(M (y_tail - s))`, so its Pareto front is reached exactly
//! when the tail sits at the shift `s` (where `g = 1`).

mod base;
mod suite;
mod transform;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use base::{evaluate_base_function, BaseFunction};
pub use suite::{
    build_builtin_suite, builtin_instance, load_instance_dir, InstanceManifest, TaskManifest,
    BUILTIN_NAMES, SUITE_VERSION,
};
pub use transform::{
    format_transform_data, load_transform_data, parse_transform_data, Rotation, TransformData,
    LOAD_ORTHOGONALITY_TOL,
};

use crate::space::{map_to_task_space, EvalBudget, SpaceError, TaskSpace, UnifiedVector};

/// Orthogonality tolerance enforced on task rotations.
pub const TASK_ORTHOGONALITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("empty input vector")]
    EmptyInput,
    #[error("unknown base function {0:?}")]
    UnknownBaseFunction(String),
    #[error("unknown front shape {0:?}")]
    UnknownShape(String),
    #[error("unknown instance {0:?}")]
    UnknownInstance(String),
    #[error("malformed transform data at line {line}: {reason}")]
    MalformedTransform { line: usize, reason: String },
    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-orthogonal matrix (max |M Mᵀ - I| = {0:e})")]
    NonOrthogonal(f64),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("budget exceeded")]
    BudgetExceeded,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontShape {
    /// `h = 1 - sqrt(f1 / g)`
    Convex,
    /// `h = 1 - (f1 / g)^2`
    Concave,
}

impl FrontShape {
    pub fn h(self, f1: f64, g: f64) -> f64 {
        let ratio = f1 / g;
        match self {
            FrontShape::Convex => 1.0 - ratio.sqrt(),
            FrontShape::Concave => 1.0 - ratio * ratio,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrontShape::Convex => "convex",
            FrontShape::Concave => "concave",
        }
    }
}

impl FromStr for FrontShape {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "convex" => Ok(FrontShape::Convex),
            "concave" => Ok(FrontShape::Concave),
            other => Err(ProblemError::UnknownShape(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskDefinition {
    space: TaskSpace,
    shape: FrontShape,
    base: BaseFunction,
    shift: Vec<f64>,
    rotation: Rotation,
}

impl TaskDefinition {
    pub fn new(
        space: TaskSpace,
        shape: FrontShape,
        base: BaseFunction,
        shift: Vec<f64>,
        rotation: Rotation,
    ) -> Result<Self, ProblemError> {
        let d = space.dimension();
        if d < 2 {
            return Err(ProblemError::InvalidTask("dimension must be at least 2".into()));
        }
        if space.objectives() != 2 {
            return Err(ProblemError::InvalidTask(format!(
                "tasks have exactly two objectives, got {}",
                space.objectives()
            )));
        }
        if space.lower()[0] != 0.0 || space.upper()[0] != 1.0 {
            return Err(ProblemError::InvalidTask(
                "the first variable must have bounds [0, 1]".into(),
            ));
        }
        if shift.len() != d - 1 {
            return Err(ProblemError::DimensionMismatch {
                what: "shift vector",
                expected: d - 1,
                actual: shift.len(),
            });
        }
        if rotation.size() != d - 1 {
            return Err(ProblemError::DimensionMismatch {
                what: "rotation size",
                expected: d - 1,
                actual: rotation.size(),
            });
        }
        let deviation = rotation.orthogonality_error();
        if deviation > TASK_ORTHOGONALITY_TOL {
            return Err(ProblemError::NonOrthogonal(deviation));
        }
        let outside = shift
            .iter()
            .zip(&space.lower()[1..])
            .zip(&space.upper()[1..])
            .any(|((s, lo), hi)| s < lo || s > hi);
        if outside {
            return Err(ProblemError::InvalidTask("shift lies outside the bounds".into()));
        }
        Ok(Self {
            space,
            shape,
            base,
            shift,
            rotation,
        })
    }

    pub fn space(&self) -> &TaskSpace {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn shape(&self) -> FrontShape {
        self.shape
    }

    pub fn base(&self) -> BaseFunction {
        self.base
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    /// Distance function `g` at a native decision vector.
    pub fn g(&self, y: &[f64]) -> f64 {
        let centered: Vec<f64> = y[1..].iter().zip(&self.shift).map(|(v, s)| v - s).collect();
        1.0 + base::evaluate_unchecked(self.base, &self.rotation.apply(&centered))
    }

    /// Objective vector of `x` without budget accounting.
    pub fn objectives(&self, x: &UnifiedVector) -> Vec<f64> {
        let y = map_to_task_space(x, &self.space);
        let f1 = y[0];
        let g = self.g(&y);
        vec![f1, g * self.shape.h(f1, g)]
    }

    /// Unified-space coordinates of the tail optimum (the shift).
    pub fn optimum_tail_unified(&self) -> Vec<f64> {
        self.shift
            .iter()
            .zip(&self.space.lower()[1..])
            .zip(&self.space.upper()[1..])
            .map(|((s, lo), hi)| (s - lo) / (hi - lo))
            .collect()
    }

    /// A Pareto-optimal unified vector with first objective `f1`; coordinates
    /// past the task dimension are filled with 0.5.
    pub fn optimal_decision(&self, f1: f64, unified_dimension: usize) -> UnifiedVector {
        let mut v = Vec::with_capacity(unified_dimension);
        v.push(f1.clamp(0.0, 1.0));
        v.extend(self.optimum_tail_unified().into_iter().map(|t| t.clamp(0.0, 1.0)));
        v.resize(unified_dimension.max(v.len()), 0.5);
        UnifiedVector::new(v).expect("optimal decision lies in the unit box")
    }
}

/// Evaluates `x` on `task`, charging one evaluation to `budget`.
pub fn evaluate_task(
    task: &TaskDefinition,
    x: &UnifiedVector,
    budget: &mut EvalBudget,
) -> Result<Vec<f64>, ProblemError> {
    budget.consume().map_err(|_| ProblemError::BudgetExceeded)?;
    Ok(task.objectives(x))
}

/// `count` points of the analytic front on a uniform grid of `f1 ∈ [0, 1]`.
pub fn true_front_sample(task: &TaskDefinition, count: usize) -> Vec<Vec<f64>> {
    front_sample(task.shape, count)
}

pub fn front_sample(shape: FrontShape, count: usize) -> Vec<Vec<f64>> {
    let count = count.max(2);
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            let f1 = i as f64 / last;
            vec![f1, shape.h(f1, 1.0)]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intersection {
    Complete,
    Partial,
    None,
}

impl Intersection {
    pub fn code(self) -> &'static str {
        match self {
            Intersection::Complete => "CI",
            Intersection::Partial => "PI",
            Intersection::None => "NI",
        }
    }
}

impl FromStr for Intersection {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CI" => Ok(Intersection::Complete),
            "PI" => Ok(Intersection::Partial),
            "NI" => Ok(Intersection::None),
            other => Err(ProblemError::InvalidInstance(format!("unknown intersection {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Similarity {
    High,
    Medium,
    Low,
}

impl Similarity {
    pub fn code(self) -> &'static str {
        match self {
            Similarity::High => "HS",
            Similarity::Medium => "MS",
            Similarity::Low => "LS",
        }
    }
}

impl FromStr for Similarity {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "HS" => Ok(Similarity::High),
            "MS" => Ok(Similarity::Medium),
            "LS" => Ok(Similarity::Low),
            other => Err(ProblemError::InvalidInstance(format!("unknown similarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDefinition {
    name: String,
    category: (Intersection, Similarity),
    tasks: Vec<TaskDefinition>,
}

impl InstanceDefinition {
    /// An instance with `K >= 1` tasks. Single-task instances are only used
    /// to run the single-task baseline.
    pub fn new(
        name: impl Into<String>,
        category: (Intersection, Similarity),
        tasks: Vec<TaskDefinition>,
    ) -> Result<Self, ProblemError> {
        if tasks.is_empty() {
            return Err(ProblemError::InvalidInstance("no tasks".into()));
        }
        Ok(Self {
            name: name.into(),
            category,
            tasks,
        })
    }

    pub fn single_task(name: impl Into<String>, task: TaskDefinition) -> Self {
        Self {
            name: name.into(),
            category: (Intersection::None, Similarity::Low),
            tasks: vec![task],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn category(&self) -> (Intersection, Similarity) {
        self.category
    }

    pub fn tasks(&self) -> &[TaskDefinition] {
        &self.tasks
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// `D_u = max_k D_k`.
    pub fn unified_dimension(&self) -> usize {
        self.tasks.iter().map(TaskDefinition::dimension).max().unwrap_or(0)
    }
}

impl fmt::Display for InstanceDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}/{}, K={})",
            self.name,
            self.category.0.code(),
            self.category.1.code(),
            self.tasks.len()
        )
    }
}
