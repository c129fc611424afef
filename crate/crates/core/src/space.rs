//! Shared domain types: the unified search space, per-task decision spaces,
//! ideal points, evaluation budgets and seeded random streams.
//!
//! Every individual lives in `[0, 1]^D_u`, where `D_u` is the largest task
//! dimension of the instance. A task of dimension `D_k <= D_u` decodes only
//! the first `D_k` coordinates and ignores the rest.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("non-finite gene at index {0}")]
    NonFiniteGene(usize),
    #[error("gene {index} = {value} lies outside [0, 1]")]
    OutOfUnitInterval { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid bounds at variable {0}: lower must be strictly below upper")]
    InvalidBounds(usize),
    #[error("task space must have at least one variable and one objective")]
    EmptySpace,
    #[error("budget exceeded")]
    BudgetExceeded,
    #[error("budget limit must be positive")]
    ZeroBudget,
}

/// An individual encoded in the unified search space.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedVector(Vec<f64>);

impl UnifiedVector {
    /// Wraps `values` after checking that every coordinate is finite and in `[0, 1]`.
    pub fn new(values: Vec<f64>) -> Result<Self, SpaceError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(SpaceError::NonFiniteGene(index));
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(SpaceError::OutOfUnitInterval { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn random<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Self {
        Self((0..dimension).map(|_| rng.gen::<f64>()).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for UnifiedVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Box-bounded decision space of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    objectives: usize,
}

impl TaskSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, objectives: usize) -> Result<Self, SpaceError> {
        if lower.is_empty() || objectives == 0 {
            return Err(SpaceError::EmptySpace);
        }
        if lower.len() != upper.len() {
            return Err(SpaceError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(SpaceError::InvalidBounds(j));
            }
        }
        Ok(Self {
            lower,
            upper,
            objectives,
        })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn objectives(&self) -> usize {
        self.objectives
    }

    /// Inverse of [`map_to_task_space`] for a native point inside the box.
    pub fn to_unified(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (v - lo) / (hi - lo))
            .collect()
    }
}

/// Decodes the first `D_k` unified coordinates into the task's native box.
///
/// Panics if `x` is shorter than the task dimension; instances are built so
/// that `D_u = max_k D_k`.
pub fn map_to_task_space(x: &UnifiedVector, space: &TaskSpace) -> Vec<f64> {
    assert!(
        x.len() >= space.dimension(),
        "unified vector shorter than task dimension"
    );
    x.values()
        .iter()
        .zip(space.lower.iter().zip(&space.upper))
        .map(|(&xj, (&lo, &hi))| lo + (hi - lo) * xj)
        .collect()
}

/// Clamps every coordinate into `[0, 1]`.
pub fn clamp_repair(x: &[f64]) -> Result<UnifiedVector, SpaceError> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.is_finite() {
                Ok(v.clamp(0.0, 1.0))
            } else {
                Err(SpaceError::NonFiniteGene(i))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(UnifiedVector)
}

/// Running componentwise minimum of all objective vectors seen on one task.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint(Vec<f64>);

impl IdealPoint {
    /// An ideal point that has not seen any evaluation yet (`+inf` sentinel).
    pub fn unset(objectives: usize) -> Self {
        Self(vec![f64::INFINITY; objectives])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn update(&mut self, f: &[f64]) -> Result<(), SpaceError> {
        if f.len() != self.0.len() {
            return Err(SpaceError::DimensionMismatch {
                expected: self.0.len(),
                actual: f.len(),
            });
        }
        for (z, &v) in self.0.iter_mut().zip(f) {
            if v < *z {
                *z = v;
            }
        }
        Ok(())
    }
}

pub fn update_ideal_point(z: &IdealPoint, f: &[f64]) -> Result<IdealPoint, SpaceError> {
    let mut next = z.clone();
    next.update(f)?;
    Ok(next)
}

/// Counts objective-function evaluations against a hard limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    consumed: u64,
    limit: u64,
}

impl EvalBudget {
    pub fn new(limit: u64) -> Result<Self, SpaceError> {
        if limit == 0 {
            return Err(SpaceError::ZeroBudget);
        }
        Ok(Self { consumed: 0, limit })
    }

    /// Charges one evaluation, failing without charging once the limit is reached.
    pub fn consume(&mut self) -> Result<(), SpaceError> {
        if self.consumed >= self.limit {
            return Err(SpaceError::BudgetExceeded);
        }
        self.consumed += 1;
        Ok(())
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.consumed
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed >= self.limit
    }
}

/// Seeded random stream backed by ChaCha8.
///
/// ChaCha8 output is specified independently of platform and word size, and
/// `rand`'s float and range sampling are value-stable, so a seed pins the
/// whole draw sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.uniform() < 0.5
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }

    /// Derives an independent stream for a labelled sub-computation.
    pub fn child(&self, label: &str) -> RngStream {
        RngStream::new(derive_seed(self.seed, &[label.as_bytes()]))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a root seed with labelled parts (FNV-1a per part, SplitMix64 between).
///
/// Pure function of its inputs; used to give every (instance, algorithm,
/// repetition) its own stream.
pub fn derive_seed(root: u64, parts: &[&[u8]]) -> u64 {
    let mut acc = splitmix64(root);
    for part in parts {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in *part {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        acc = splitmix64(acc ^ h);
    }
    acc
}
