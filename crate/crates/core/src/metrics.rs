//! Front quality indicators and rank statistics.
//!
//! IGD defaults to the square-root-of-sum form
//! `IGD = sqrt(Σ_{x ∈ PF*} d(x, S)²) / |PF*|`, which is not the common
//! mean-of-distances form; [`IgdForm`] selects either, and every output that
//! reports IGD names the form it used.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty approximation set")]
    EmptyApproximation,
    #[error("empty reference set")]
    EmptyReference,
    #[error("degenerate normalization axis {0}: nadir must exceed ideal")]
    DegenerateAxis(usize),
    #[error("expected {expected} objectives, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("need at least two algorithms to rank, got {0}")]
    TooFewAlgorithms(usize),
    #[error("need at least one instance to rank")]
    NoInstances,
    #[error("missing or non-finite value for algorithm {algorithm}, instance {instance}")]
    MissingCell { algorithm: usize, instance: usize },
    #[error("unknown IGD form {0:?}")]
    UnknownIgdForm(String),
}

/// `a` weakly dominates `b` (no worse everywhere).
fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Keeps the points not weakly dominated by any other kept point; duplicates
/// collapse to their first occurrence. Input order is preserved.
pub fn nondominated_filter(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let dominated = weakly_dominates(q, p) && (q != p || j < i);
            if dominated {
                continue 'outer;
            }
        }
        kept.push(p.clone());
    }
    kept
}

pub fn normalize_front(
    points: &[Vec<f64>],
    ideal: &[f64],
    nadir: &[f64],
) -> Result<Vec<Vec<f64>>, MetricError> {
    if ideal.len() != nadir.len() {
        return Err(MetricError::Dimension {
            expected: ideal.len(),
            actual: nadir.len(),
        });
    }
    if let Some(axis) = (0..ideal.len()).find(|&i| nadir[i].partial_cmp(&ideal[i]) != Some(std::cmp::Ordering::Greater)) {
        return Err(MetricError::DegenerateAxis(axis));
    }
    points
        .iter()
        .map(|p| {
            if p.len() != ideal.len() {
                return Err(MetricError::Dimension {
                    expected: ideal.len(),
                    actual: p.len(),
                });
            }
            Ok(p.iter()
                .zip(ideal.iter().zip(nadir))
                .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
                .collect())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IgdForm {
    /// `sqrt(Σ d²) / |PF*|`
    #[default]
    Printed,
    /// `Σ d / |PF*|`
    Mean,
}

impl IgdForm {
    pub fn label(self) -> &'static str {
        match self {
            IgdForm::Printed => "printed",
            IgdForm::Mean => "mean",
        }
    }
}

impl fmt::Display for IgdForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for IgdForm {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(IgdForm::Printed),
            "mean" => Ok(IgdForm::Mean),
            other => Err(MetricError::UnknownIgdForm(other.to_string())),
        }
    }
}

fn nearest_squared_distance(x: &[f64], approx: &[Vec<f64>]) -> f64 {
    approx
        .iter()
        .map(|y| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// IGD in the default (square-root-of-sum) form.
pub fn igd(approx: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64, MetricError> {
    igd_with(approx, reference, IgdForm::Printed)
}

pub fn igd_with(approx: &[Vec<f64>], reference: &[Vec<f64>], form: IgdForm) -> Result<f64, MetricError> {
    if approx.is_empty() {
        return Err(MetricError::EmptyApproximation);
    }
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let n = reference.len() as f64;
    Ok(match form {
        IgdForm::Printed => {
            reference
                .iter()
                .map(|x| nearest_squared_distance(x, approx))
                .sum::<f64>()
                .sqrt()
                / n
        }
        IgdForm::Mean => {
            reference
                .iter()
                .map(|x| nearest_squared_distance(x, approx).sqrt())
                .sum::<f64>()
                / n
        }
    })
}

/// Exact two-objective hypervolume by a staircase sweep. Points that do not
/// strictly dominate `reference` contribute nothing.
pub fn hv_2d(approx: &[Vec<f64>], reference: &[f64]) -> Result<f64, MetricError> {
    if reference.len() != 2 {
        return Err(MetricError::Dimension {
            expected: 2,
            actual: reference.len(),
        });
    }
    if let Some(p) = approx.iter().find(|p| p.len() != 2) {
        return Err(MetricError::Dimension {
            expected: 2,
            actual: p.len(),
        });
    }
    let mut inside: Vec<(f64, f64)> = approx
        .iter()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .map(|p| (p[0], p[1]))
        .collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for (f1, f2) in inside {
        if f2 < ceiling {
            volume += (reference[0] - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    Ok(volume)
}

/// Direction of a metric when ranking algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Better {
    Lower,
    Higher,
}

/// Average Friedman ranks. `values[a][i]` is algorithm `a` on instance `i`;
/// rank 1 is best and tied algorithms share the mean of their ranks.
#[allow(clippy::needless_range_loop)]
pub fn friedman_average_rank(values: &[Vec<f64>], better: Better) -> Result<Vec<f64>, MetricError> {
    let algorithms = values.len();
    if algorithms < 2 {
        return Err(MetricError::TooFewAlgorithms(algorithms));
    }
    let instances = values[0].len();
    if instances == 0 {
        return Err(MetricError::NoInstances);
    }
    for (a, row) in values.iter().enumerate() {
        for i in 0..instances {
            if !row.get(i).is_some_and(|v| v.is_finite()) {
                return Err(MetricError::MissingCell {
                    algorithm: a,
                    instance: i,
                });
            }
        }
        if row.len() != instances {
            return Err(MetricError::MissingCell {
                algorithm: a,
                instance: row.len().min(instances),
            });
        }
    }
    let mut totals = vec![0.0; algorithms];
    for i in 0..instances {
        let key = |a: usize| match better {
            Better::Lower => values[a][i],
            Better::Higher => -values[a][i],
        };
        let mut order: Vec<usize> = (0..algorithms).collect();
        order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
        let mut start = 0;
        while start < algorithms {
            let mut end = start + 1;
            while end < algorithms && key(order[end]) == key(order[start]) {
                end += 1;
            }
            // positions start..end hold ranks start+1..=end
            let shared = (start + 1 + end) as f64 / 2.0;
            for &a in &order[start..end] {
                totals[a] += shared;
            }
            start = end;
        }
    }
    Ok(totals.into_iter().map(|t| t / instances as f64).collect())
}

/// Scores objective sets of one task against a fixed reference front,
/// normalizing both by the reference front's ideal and nadir points.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEvaluator {
    ideal: Vec<f64>,
    nadir: Vec<f64>,
    reference: Vec<Vec<f64>>,
    hv_reference: Vec<f64>,
    form: IgdForm,
}

impl FrontEvaluator {
    pub fn new(reference_front: &[Vec<f64>], hv_reference: Vec<f64>, form: IgdForm) -> Result<Self, MetricError> {
        let first = reference_front.first().ok_or(MetricError::EmptyReference)?;
        let m = first.len();
        let mut ideal = vec![f64::INFINITY; m];
        let mut nadir = vec![f64::NEG_INFINITY; m];
        for p in reference_front {
            for i in 0..m {
                ideal[i] = ideal[i].min(p[i]);
                nadir[i] = nadir[i].max(p[i]);
            }
        }
        let reference = normalize_front(reference_front, &ideal, &nadir)?;
        Ok(Self {
            ideal,
            nadir,
            reference,
            hv_reference,
            form,
        })
    }

    pub fn ideal(&self) -> &[f64] {
        &self.ideal
    }

    pub fn nadir(&self) -> &[f64] {
        &self.nadir
    }

    pub fn form(&self) -> IgdForm {
        self.form
    }

    /// (IGD, HV) of an already non-dominated front in raw objective units.
    pub fn score_front(&self, front: &[Vec<f64>]) -> Result<(f64, f64), MetricError> {
        let normalized = normalize_front(front, &self.ideal, &self.nadir)?;
        let igd = igd_with(&normalized, &self.reference, self.form)?;
        let hv = hv_2d(&normalized, &self.hv_reference)?;
        Ok((igd, hv))
    }

    /// Non-dominated front of `objectives` together with its (IGD, HV).
    pub fn score(&self, objectives: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, f64, f64), MetricError> {
        let front = nondominated_filter(objectives);
        let (igd, hv) = self.score_front(&front)?;
        Ok((front, igd, hv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Vec<f64>> {
        v.iter().map(|&(a, b)| vec![a, b]).collect()
    }

    #[test]
    fn filter_examples() {
        assert_eq!(nondominated_filter(&pts(&[(0.0, 1.0), (1.0, 0.0)])).len(), 2);
        assert_eq!(nondominated_filter(&pts(&[(0.0, 1.0), (0.0, 1.0)])), pts(&[(0.0, 1.0)]));
        assert_eq!(
            nondominated_filter(&pts(&[(0.5, 0.5), (0.4, 0.6), (0.6, 0.6)])),
            pts(&[(0.5, 0.5), (0.4, 0.6)])
        );
    }

    #[test]
    fn normalization_examples() {
        let n = normalize_front(&pts(&[(1.0, 1.0), (5.0, 9.0), (3.0, 5.0)]), &[1.0, 1.0], &[5.0, 9.0]).unwrap();
        assert_eq!(n, pts(&[(0.0, 0.0), (1.0, 1.0), (0.5, 0.5)]));
        assert_eq!(
            normalize_front(&pts(&[(1.0, 1.0)]), &[1.0, 1.0], &[1.0, 2.0]),
            Err(MetricError::DegenerateAxis(0))
        );
    }

    #[test]
    fn igd_examples() {
        let pf = pts(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(igd(&pts(&[(0.0, 1.0), (1.0, 0.0), (0.5, 0.5)]), &pf).unwrap(), 0.0);
        let v = igd(&pts(&[(0.0, 1.0)]), &pf).unwrap();
        assert!((v - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let mean = igd_with(&pts(&[(0.0, 1.0)]), &pf, IgdForm::Mean).unwrap();
        assert!((mean - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(igd(&[], &pf), Err(MetricError::EmptyApproximation));
        assert_eq!(igd(&pf, &[]), Err(MetricError::EmptyReference));
        assert_eq!("mean".parse::<IgdForm>().unwrap(), IgdForm::Mean);
        assert!("median".parse::<IgdForm>().is_err());
    }

    #[test]
    fn duplicated_reference_scales_printed_form() {
        // doubling PF* by duplication doubles the sum under the root and the
        // divisor, so the value shrinks by a factor sqrt(2)
        let pf = pts(&[(0.0, 1.0), (0.3, 0.4), (1.0, 0.0)]);
        let s = pts(&[(0.1, 0.8), (0.9, 0.05)]);
        let doubled: Vec<Vec<f64>> = pf.iter().chain(&pf).cloned().collect();
        let a = igd(&s, &pf).unwrap();
        let b = igd(&s, &doubled).unwrap();
        assert!((a / b - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hv_examples() {
        assert_eq!(hv_2d(&pts(&[(0.5, 0.5)]), &[1.0, 1.0]).unwrap(), 0.25);
        assert_eq!(hv_2d(&pts(&[(1.0, 0.5), (1.2, 1.3)]), &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hv_2d(&[], &[1.0, 1.0]).unwrap(), 0.0);
        let v = hv_2d(&pts(&[(0.2, 0.6), (0.5, 0.3), (0.6, 0.7)]), &[1.0, 1.0]).unwrap();
        assert!((v - (0.8 * 0.4 + 0.5 * 0.3)).abs() < 1e-15);
        assert!(hv_2d(&[vec![0.1, 0.1, 0.1]], &[1.0, 1.0]).is_err());
        assert!(hv_2d(&pts(&[(0.1, 0.1)]), &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn friedman_examples() {
        let flat = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(friedman_average_rank(&flat, Better::Lower).unwrap(), vec![2.0, 2.0, 2.0]);
        let two = vec![vec![0.1, 0.2], vec![0.3, 0.4]];
        assert_eq!(friedman_average_rank(&two, Better::Lower).unwrap(), vec![1.0, 2.0]);
        assert_eq!(friedman_average_rank(&two, Better::Higher).unwrap(), vec![2.0, 1.0]);
        assert_eq!(
            friedman_average_rank(&[vec![1.0]], Better::Lower),
            Err(MetricError::TooFewAlgorithms(1))
        );
        assert!(matches!(
            friedman_average_rank(&[vec![1.0, 2.0], vec![1.0]], Better::Lower),
            Err(MetricError::MissingCell { algorithm: 1, instance: 1 })
        ));
        assert!(matches!(
            friedman_average_rank(&[vec![1.0], vec![f64::NAN]], Better::Lower),
            Err(MetricError::MissingCell { .. })
        ));
    }

    #[test]
    fn friedman_orders_like_the_ablation_table() {
        // three algorithms over six cells: DN best on most, EN edges out IN
        let values = vec![
            vec![1.0, 1.0, 1.0, 2.0, 1.0, 2.0],
            vec![3.0, 2.0, 3.0, 1.0, 3.0, 3.0],
            vec![2.0, 3.0, 2.0, 3.0, 2.0, 1.0],
        ];
        let r = friedman_average_rank(&values, Better::Lower).unwrap();
        assert!(r[0] < r[2] && r[2] < r[1]);
    }

    fn front() -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(0.0f64..1.2, 2), 1..15)
    }

    proptest! {
        #[test]
        fn igd_never_grows_when_adding_points(s in front(), extra in front(), pf in front()) {
            let before = igd(&s, &pf).unwrap();
            let grown: Vec<Vec<f64>> = s.iter().chain(&extra).cloned().collect();
            prop_assert!(igd(&grown, &pf).unwrap() <= before + 1e-15);
        }

        #[test]
        fn igd_zero_iff_all_reference_points_matched(s in front(), pf in front()) {
            let v = igd(&s, &pf).unwrap();
            let matched = pf.iter().all(|x| s.contains(x));
            prop_assert_eq!(v == 0.0, matched);
        }

        #[test]
        fn hv_monotone_and_filter_invariant(s in front(), extra in front()) {
            let r = [1.0, 1.0];
            let base = hv_2d(&s, &r).unwrap();
            let grown: Vec<Vec<f64>> = s.iter().chain(&extra).cloned().collect();
            prop_assert!(hv_2d(&grown, &r).unwrap() >= base - 1e-15);
            prop_assert_eq!(base, hv_2d(&nondominated_filter(&s), &r).unwrap());
        }

        #[test]
        fn filtered_points_are_mutually_nondominated(s in front()) {
            let kept = nondominated_filter(&s);
            for (i, a) in kept.iter().enumerate() {
                for (j, b) in kept.iter().enumerate() {
                    if i != j { prop_assert!(!weakly_dominates(a, b)); }
                }
            }
            for p in &s {
                prop_assert!(kept.iter().any(|k| weakly_dominates(k, p)));
            }
        }

        #[test]
        fn rank_sums_are_constant(values in proptest::collection::vec(proptest::collection::vec(0u8..4, 5), 2..6)) {
            let values: Vec<Vec<f64>> = values.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
            let n = values.len() as f64;
            let ranks = friedman_average_rank(&values, Better::Lower).unwrap();
            prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-12);
        }
    }
}
