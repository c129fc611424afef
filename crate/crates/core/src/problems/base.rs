use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use super::ProblemError;

/// Landscape used for the distance function `g` of a task.
///
/// Every kind is nonnegative and vanishes exactly at the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseFunction {
    Sphere,
    /// Evaluated at `z + 1` so that the optimum sits at the origin.
    Rosenbrock,
    Ackley,
    Rastrigin,
    Griewank,
    MeanAbs,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 6] = [
        BaseFunction::Sphere,
        BaseFunction::Rosenbrock,
        BaseFunction::Ackley,
        BaseFunction::Rastrigin,
        BaseFunction::Griewank,
        BaseFunction::MeanAbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Griewank => "griewank",
            BaseFunction::MeanAbs => "meanabs",
        }
    }
}

impl fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseFunction {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseFunction::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ProblemError::UnknownBaseFunction(s.to_string()))
    }
}

pub fn evaluate_base_function(kind: BaseFunction, z: &[f64]) -> Result<f64, ProblemError> {
    if z.is_empty() {
        return Err(ProblemError::EmptyInput);
    }
    Ok(evaluate_unchecked(kind, z))
}

pub(crate) fn evaluate_unchecked(kind: BaseFunction, z: &[f64]) -> f64 {
    let d = z.len() as f64;
    match kind {
        BaseFunction::Sphere => z.iter().map(|v| v * v).sum(),
        BaseFunction::Rosenbrock => z
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                100.0 * (b - a * a).powi(2) + (1.0 - a).powi(2)
            })
            .sum(),
        BaseFunction::Ackley => {
            let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
            let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
            (-20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E).max(0.0)
        }
        BaseFunction::Rastrigin => z
            .iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
            .sum(),
        BaseFunction::Griewank => {
            let s = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
            let p: f64 = z
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            (1.0 + s - p).max(0.0)
        }
        BaseFunction::MeanAbs => z.iter().map(|v| v.abs()).sum::<f64>() / d,
    }
}
