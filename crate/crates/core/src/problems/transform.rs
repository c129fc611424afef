//! Shift/rotation transform data.
//!
//! Plain whitespace-separated text. Lines starting with `#` and blank lines
//! are ignored. The first data line is the shift vector (length `D - 1`),
//! followed by the `D - 1` rows of the rotation matrix.

use std::fmt::Write as _;
use std::path::Path;

use super::ProblemError;

/// Orthogonality tolerance for loaded matrices.
pub const LOAD_ORTHOGONALITY_TOL: f64 = 1e-6;

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    size: usize,
    data: Vec<f64>,
}

impl Rotation {
    pub fn identity(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        Self { size, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ProblemError> {
        let size = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != size) {
            return Err(ProblemError::DimensionMismatch {
                what: "rotation row",
                expected: size,
                actual: bad.len(),
            });
        }
        Ok(Self {
            size,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute entry of `M Mᵀ - I`.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.size {
            for j in 0..self.size {
                let dot: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformData {
    pub shift: Vec<f64>,
    pub rotation: Rotation,
}

/// Reads transform data for a task of dimension `task_dimension`.
pub fn load_transform_data(path: &Path, task_dimension: usize) -> Result<TransformData, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|e| ProblemError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_transform_data(&text, task_dimension)
}

pub fn parse_transform_data(text: &str, task_dimension: usize) -> Result<TransformData, ProblemError> {
    if task_dimension < 2 {
        return Err(ProblemError::DimensionMismatch {
            what: "task dimension",
            expected: 2,
            actual: task_dimension,
        });
    }
    let tail = task_dimension - 1;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ProblemError::MalformedTransform {
                        line: lineno + 1,
                        reason: format!("not a finite number: {tok:?}"),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let Some((shift, matrix)) = rows.split_first() else {
        return Err(ProblemError::MalformedTransform {
            line: 0,
            reason: "no data lines".into(),
        });
    };
    if shift.len() != tail {
        return Err(ProblemError::DimensionMismatch {
            what: "shift vector",
            expected: tail,
            actual: shift.len(),
        });
    }
    if matrix.len() != tail {
        return Err(ProblemError::DimensionMismatch {
            what: "rotation row count",
            expected: tail,
            actual: matrix.len(),
        });
    }
    let rotation = Rotation::from_rows(matrix.to_vec())?;
    let deviation = rotation.orthogonality_error();
    if deviation > LOAD_ORTHOGONALITY_TOL {
        return Err(ProblemError::NonOrthogonal(deviation));
    }
    Ok(TransformData {
        shift: shift.clone(),
        rotation,
    })
}

/// Serializes transform data with full round-trip precision.
pub fn format_transform_data(data: &TransformData, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "{}", join(&data.shift));
    for i in 0..data.rotation.size() {
        let _ = writeln!(out, "{}", join(data.rotation.row(i)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_file() {
        let t = parse_transform_data("# identity\n0 0\n1 0\n0 1\n", 3).unwrap();
        assert_eq!(t.shift, vec![0.0, 0.0]);
        assert_eq!(t.rotation, Rotation::identity(2));
    }

    #[test]
    fn quarter_turn_is_accepted() {
        let t = parse_transform_data("0.5 -0.5\n0 -1\n1 0\n", 3).unwrap();
        assert_eq!(t.rotation.apply(&[1.0, 0.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn shear_is_rejected() {
        let err = parse_transform_data("0 0\n1 1\n0 1\n", 3).unwrap_err();
        assert!(matches!(err, ProblemError::NonOrthogonal(_)));
        assert!(err.to_string().contains("non-orthogonal matrix"));
    }

    #[test]
    fn distinct_errors_per_check() {
        assert!(matches!(
            parse_transform_data("0 x\n1 0\n0 1\n", 3),
            Err(ProblemError::MalformedTransform { line: 1, .. })
        ));
        assert!(matches!(
            parse_transform_data("0 0 0\n1 0\n0 1\n", 3),
            Err(ProblemError::DimensionMismatch { what: "shift vector", .. })
        ));
        assert!(matches!(
            parse_transform_data("0 0\n1 0\n", 3),
            Err(ProblemError::DimensionMismatch { what: "rotation row count", .. })
        ));
        assert!(matches!(
            parse_transform_data("0 0\n1 0 0\n0 1\n", 3),
            Err(ProblemError::DimensionMismatch { what: "rotation row", .. })
        ));
        assert!(matches!(
            parse_transform_data("# only comments\n", 3),
            Err(ProblemError::MalformedTransform { .. })
        ));
    }

    #[test]
    fn format_round_trips() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let data = TransformData {
            shift: vec![0.1, -2.5],
            rotation: Rotation::from_rows(vec![vec![c, -c], vec![c, c]]).unwrap(),
        };
        let text = format_transform_data(&data, "test");
        assert_eq!(parse_transform_data(&text, 3).unwrap(), data);
    }

    #[test]
    fn load_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        std::fs::write(&path, "1 2\n0 -1\n1 0\n").unwrap();
        let t = load_transform_data(&path, 3).unwrap();
        assert_eq!(t.shift, vec![1.0, 2.0]);
        assert!(matches!(
            load_transform_data(&dir.path().join("missing.txt"), 3),
            Err(ProblemError::Io { .. })
        ));
    }
}
