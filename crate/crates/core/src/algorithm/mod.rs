//! The dual-neighborhood multitasking driver, its single-neighborhood
//! ablations and the single-task decomposition baseline.

mod engine;
mod state;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use engine::{
    run, run_moead_baseline, Checkpoint, MetricSettings, Optimizer, RunStats, RunTrace, Selection,
    UpdateOutcome,
};
pub use state::{ExternalNeighborhood, MultitaskState, SubproblemState, TaskPopulation};

use crate::decomposition::DecompositionError;
use crate::gra::{GraError, DEFAULT_RHO};
use crate::metrics::MetricError;
use crate::problems::ProblemError;
use crate::space::SpaceError;
use crate::variation::{VariationError, VariationParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("budget too small to initialize: need {needed}, have {available}")]
    BudgetTooSmall { needed: u64, available: u64 },
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Variation(#[from] VariationError),
    #[error(transparent)]
    Gra(#[from] GraError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Internal and external neighborhoods with bidirectional updates.
    Dual,
    /// Internal neighborhood only; no information crosses tasks.
    InternalOnly,
    /// The neighborhood branch always uses the external neighborhood, and
    /// offspring only update that external neighborhood.
    ExternalOnly,
    /// Single-task decomposition loop with capped replacement.
    MoeadBaseline,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Dual,
        Mode::InternalOnly,
        Mode::ExternalOnly,
        Mode::MoeadBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Dual => "dual",
            Mode::InternalOnly => "internal-only",
            Mode::ExternalOnly => "external-only",
            Mode::MoeadBaseline => "moead-baseline",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = AlgorithmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| AlgorithmError::InvalidConfig(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmConfig {
    /// Sub-population size `N` (per task).
    pub population_size: usize,
    /// Internal neighborhood size `T`.
    pub neighborhood_size: usize,
    /// Probability of mating within a neighborhood rather than the whole
    /// sub-population.
    pub beta: f64,
    pub mode: Mode,
    /// Maximum replacements per offspring; only the baseline uses one.
    pub replacement_cap: Option<usize>,
    pub variation: VariationParams,
    /// Distinguishing coefficient of the grey relational degree.
    pub rho: f64,
}

impl AlgorithmConfig {
    /// Defaults for `mode`: β = 0.1, T = 10 for the multitasking modes and
    /// β = 0.9, T = 20, n_r = 2 for the baseline, with N = 100.
    pub fn preset(mode: Mode) -> Self {
        let base = Self {
            population_size: 100,
            neighborhood_size: 10,
            beta: 0.1,
            mode,
            replacement_cap: None,
            variation: VariationParams::default(),
            rho: DEFAULT_RHO,
        };
        match mode {
            Mode::MoeadBaseline => Self {
                neighborhood_size: 20,
                beta: 0.9,
                replacement_cap: Some(2),
                ..base
            },
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<(), AlgorithmError> {
        let invalid = |msg: String| Err(AlgorithmError::InvalidConfig(msg));
        if self.population_size < 2 {
            return invalid(format!(
                "population size must be at least 2, got {}",
                self.population_size
            ));
        }
        if self.neighborhood_size < 2 || self.neighborhood_size > self.population_size {
            return invalid(format!(
                "neighborhood size must lie in 2..={}, got {}",
                self.population_size, self.neighborhood_size
            ));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return invalid(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return invalid(format!("rho must lie in [0, 1], got {}", self.rho));
        }
        match (self.mode, self.replacement_cap) {
            (Mode::MoeadBaseline, None) | (Mode::MoeadBaseline, Some(0)) => {
                return invalid("the baseline needs a replacement cap of at least 1".into())
            }
            (Mode::MoeadBaseline, _) | (_, None) => {}
            (mode, Some(_)) => {
                return invalid(format!("mode {mode} does not take a replacement cap"))
            }
        }
        self.variation.validate()?;
        Ok(())
    }
}
