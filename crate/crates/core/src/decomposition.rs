//! Weight vectors, weight-space neighborhoods and the achievement
//! scalarizing function.

use thiserror::Error;

/// Floor applied to weight components before they are inverted in [`asf`].
pub const WEIGHT_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("unsupported objective count {0}: only two objectives are supported")]
    UnsupportedObjectiveCount(usize),
    #[error("at least two weight vectors are required, got {0}")]
    TooFewWeights(usize),
    #[error("neighborhood size {size} out of range 1..={population}")]
    NeighborhoodSize { size: usize, population: usize },
}

/// Uniform simplex lattice `w_i = (i/(N-1), 1 - i/(N-1))` for two objectives.
pub fn generate_weight_vectors(n: usize, objectives: usize) -> Result<Vec<Vec<f64>>, DecompositionError> {
    if objectives != 2 {
        return Err(DecompositionError::UnsupportedObjectiveCount(objectives));
    }
    if n < 2 {
        return Err(DecompositionError::TooFewWeights(n));
    }
    let steps = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let a = i as f64 / steps;
            vec![a, 1.0 - a]
        })
        .collect())
}

/// Squared distance quantized to 1e-12 so that lattice ties survive rounding noise.
fn distance_key(a: &[f64], b: &[f64]) -> i64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (d2 * 1e12).round() as i64
}

/// For every weight, the indices of its `size` nearest weights (itself
/// included), ordered by distance with ties broken toward the lower index.
pub fn build_internal_neighborhood(
    weights: &[Vec<f64>],
    size: usize,
) -> Result<Vec<Vec<usize>>, DecompositionError> {
    let n = weights.len();
    if size == 0 || size > n {
        return Err(DecompositionError::NeighborhoodSize {
            size,
            population: n,
        });
    }
    Ok(weights
        .iter()
        .map(|wi| {
            let mut order: Vec<(i64, usize)> = weights
                .iter()
                .enumerate()
                .map(|(j, wj)| (distance_key(wi, wj), j))
                .collect();
            order.sort_unstable();
            order.into_iter().take(size).map(|(_, j)| j).collect()
        })
        .collect())
}

/// Achievement scalarizing function `max_i |f_i - z_i| / max(w_i, WEIGHT_FLOOR)`.
pub fn asf(f: &[f64], w: &[f64], z: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), w.len());
    debug_assert_eq!(f.len(), z.len());
    f.iter()
        .zip(w)
        .zip(z)
        .map(|((fi, wi), zi)| (fi - zi).abs() / wi.max(WEIGHT_FLOOR))
        .fold(f64::NEG_INFINITY, f64::max)
}
