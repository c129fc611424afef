//! Grey relational analysis between a reference sequence and a set of
//! compared sequences.
//!
//! Sequences here are means of unified-space vectors, so they already lie in
//! `[0, 1]` and need no extra normalization. All sequences use the full
//! unified dimension, which makes subpopulations of tasks with different
//! native dimensions comparable.

use thiserror::Error;

use crate::space::UnifiedVector;

/// Distinguishing coefficient used when none is configured.
pub const DEFAULT_RHO: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraError {
    #[error("reference sequence is empty")]
    EmptyReference,
    #[error("no compared sequences")]
    NoComparedSequences,
    #[error("compared sequence {index} has length {actual}, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("sequence value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("distinguishing coefficient {0} outside [0, 1]")]
    InvalidRho(f64),
    #[error("empty index set")]
    EmptyIndexSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSet {
    reference: Vec<f64>,
    compared: Vec<Vec<f64>>,
    rho: f64,
}

impl SequenceSet {
    pub fn new(reference: Vec<f64>, compared: Vec<Vec<f64>>, rho: f64) -> Result<Self, GraError> {
        if reference.is_empty() {
            return Err(GraError::EmptyReference);
        }
        if compared.is_empty() {
            return Err(GraError::NoComparedSequences);
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(GraError::InvalidRho(rho));
        }
        let n = reference.len();
        for (index, x) in compared.iter().enumerate() {
            if x.len() != n {
                return Err(GraError::LengthMismatch {
                    index,
                    expected: n,
                    actual: x.len(),
                });
            }
        }
        if let Some(&bad) = reference
            .iter()
            .chain(compared.iter().flatten())
            .find(|v| !(0.0..=1.0).contains(*v))
        {
            return Err(GraError::OutOfRange(bad));
        }
        Ok(Self {
            reference,
            compared,
            rho,
        })
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn compared(&self) -> &[Vec<f64>] {
        &self.compared
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Grey relational degree of the reference to each compared sequence.
///
/// When every compared sequence equals the reference (`Δmax = 0`) all
/// degrees are 1, the pointwise limit of the formula.
pub fn grey_relational_degree(set: &SequenceSet) -> Vec<f64> {
    let y = &set.reference;
    let deltas: Vec<Vec<f64>> = set
        .compared
        .iter()
        .map(|x| y.iter().zip(x).map(|(a, b)| (a - b).abs()).collect())
        .collect();
    let (dmin, dmax) = deltas
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if dmax == 0.0 {
        return vec![1.0; deltas.len()];
    }
    let spread = set.rho * dmax;
    let n = y.len() as f64;
    deltas
        .iter()
        .map(|row| {
            row.iter()
                .map(|&d| {
                    let denom = d + spread;
                    // rho = 0 with d = dmin = 0: the coefficient tends to 1
                    if denom == 0.0 {
                        1.0
                    } else {
                        (dmin + spread) / denom
                    }
                })
                .sum::<f64>()
                / n
        })
        .collect()
}

/// Componentwise mean of the individuals selected by `indices`.
pub fn neighborhood_mean<'a, F>(indices: &[usize], individual: F) -> Result<Vec<f64>, GraError>
where
    F: Fn(usize) -> &'a UnifiedVector,
{
    let (&first, rest) = indices.split_first().ok_or(GraError::EmptyIndexSet)?;
    let mut acc = individual(first).values().to_vec();
    for &i in rest {
        for (a, v) in acc.iter_mut().zip(individual(i).values()) {
            *a += v;
        }
    }
    let count = indices.len() as f64;
    acc.iter_mut().for_each(|a| *a /= count);
    Ok(acc)
}

/// Index of the largest degree, lowest index on ties. Panics on empty input.
pub fn argmax_relational(r: &[f64]) -> usize {
    assert!(!r.is_empty(), "argmax of an empty degree vector");
    let mut best = 0;
    for (i, &v) in r.iter().enumerate().skip(1) {
        if v > r[best] {
            best = i;
        }
    }
    best
}
