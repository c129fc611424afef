//! Offspring production: DE/rand/1/bin followed by bounded polynomial
//! mutation on the `[0, 1]` gene domain, then clamping.

use thiserror::Error;

use crate::space::{clamp_repair, RngStream, SpaceError, UnifiedVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("candidate pool too small: need at least 2 members, got {0}")]
    PoolTooSmall(usize),
    #[error("invalid variation parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Per-gene mutation probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MutationRate {
    /// `1 / D`, with `D` the length of the mutated vector.
    InverseDimension,
    Fixed(f64),
}

impl MutationRate {
    pub fn probability(self, dimension: usize) -> f64 {
        match self {
            MutationRate::InverseDimension => 1.0 / dimension.max(1) as f64,
            MutationRate::Fixed(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    pub scale_factor: f64,
    pub crossover_rate: f64,
    pub mutation_eta: f64,
    pub mutation_rate: MutationRate,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            scale_factor: 0.5,
            crossover_rate: 0.9,
            mutation_eta: 20.0,
            mutation_rate: MutationRate::InverseDimension,
        }
    }
}

impl VariationParams {
    pub fn validate(&self) -> Result<(), VariationError> {
        if !(self.scale_factor > 0.0 && self.scale_factor.is_finite()) {
            return Err(VariationError::InvalidParameter("scale factor must be positive"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(VariationError::InvalidParameter("crossover rate must lie in [0, 1]"));
        }
        if !(self.mutation_eta > 0.0 && self.mutation_eta.is_finite()) {
            return Err(VariationError::InvalidParameter("mutation index must be positive"));
        }
        if let MutationRate::Fixed(p) = self.mutation_rate {
            if !(0.0..=1.0).contains(&p) {
                return Err(VariationError::InvalidParameter(
                    "mutation probability must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }
}

/// Binomial DE mutant `x1 + F (x2 - x3)`, inheriting from `x1` except at
/// genes drawn below `Cr` and at one forced index.
///
/// Draw order: the forced index first, then one uniform per gene.
pub fn de_rand_1_bin(
    x1: &[f64],
    x2: &[f64],
    x3: &[f64],
    params: &VariationParams,
    rng: &mut RngStream,
) -> Vec<f64> {
    let d = x1.len();
    let forced = rng.below(d);
    (0..d)
        .map(|j| {
            let take = rng.uniform() < params.crossover_rate || j == forced;
            if take {
                x1[j] + params.scale_factor * (x2[j] - x3[j])
            } else {
                x1[j]
            }
        })
        .collect()
}

/// Bounded polynomial perturbation of a single gene in `[0, 1]` for a
/// uniform draw `r`.
pub fn polynomial_delta(gene: f64, eta: f64, r: f64) -> f64 {
    let y = gene.clamp(0.0, 1.0);
    let power = 1.0 / (eta + 1.0);
    if r < 0.5 {
        let xy = 1.0 - y;
        let val = 2.0 * r + (1.0 - 2.0 * r) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = y;
        let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    }
}

/// Perturbs each gene with probability `p_m`. Genes picked for mutation are
/// first brought into `[0, 1]`; untouched genes pass through as they are.
pub fn polynomial_mutation(u: &[f64], params: &VariationParams, rng: &mut RngStream) -> Vec<f64> {
    let pm = params.mutation_rate.probability(u.len());
    u.iter()
        .map(|&gene| {
            if rng.uniform() < pm {
                let r = rng.uniform();
                let y = gene.clamp(0.0, 1.0);
                (y + polynomial_delta(y, params.mutation_eta, r)).clamp(0.0, 1.0)
            } else {
                gene
            }
        })
        .collect()
}

/// Produces one offspring with `x` as the base vector and two distinct
/// members of `candidates` as the difference pair.
pub fn reproduce(
    x: &UnifiedVector,
    candidates: &[&UnifiedVector],
    params: &VariationParams,
    rng: &mut RngStream,
) -> Result<UnifiedVector, VariationError> {
    if candidates.len() < 2 {
        return Err(VariationError::PoolTooSmall(candidates.len()));
    }
    let a = rng.below(candidates.len());
    let mut b = rng.below(candidates.len() - 1);
    if b >= a {
        b += 1;
    }
    let u = de_rand_1_bin(
        x.values(),
        candidates[a].values(),
        candidates[b].values(),
        params,
        rng,
    );
    let mutated = polynomial_mutation(&u, params, rng);
    Ok(clamp_repair(&mutated)?)
}
