//! Dimension-generic linear algebra and geometry used by the learners.

mod basis;
mod hull;
mod regression;

pub use basis::{find_basis, project, Basis};
pub use hull::{convex_hull, HalfSpace, Hull, MAX_HULL_DIM};
pub use regression::{least_squares, remove_linear_dependencies, Dependency, Regression};

use nalgebra::DMatrix;
use thiserror::Error;

/// Relative singular-value cutoff used for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Relative tolerance of the Gram-Schmidt zero test.
pub const ZERO_TOL: f64 = 1e-9;

pub type Vector = Vec<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("no points given")]
    Empty,
    #[error("rows have inconsistent dimensions ({expected} vs {found})")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("duplicate column label '{0}'")]
    DuplicateLabel(String),
    #[error("points span only {rank} of {dim} dimensions; project onto their subspace first")]
    Degenerate { dim: usize, rank: usize },
    #[error(
        "convex hulls are limited to {max} dimensions, got {dim}; restrict the functions considered (relevant functions)"
    )]
    CapacityExceeded { dim: usize, max: usize },
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rows of equal dimension under ordered, unique column labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    labels: Vec<String>,
    rows: Vec<Vector>,
}

impl PointSet {
    pub fn new(labels: Vec<String>) -> Result<Self, NumericsError> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(NumericsError::DuplicateLabel(l.clone()));
            }
        }
        Ok(PointSet {
            labels,
            rows: Vec::new(),
        })
    }

    pub fn from_rows(labels: Vec<String>, rows: Vec<Vector>) -> Result<Self, NumericsError> {
        let mut ps = PointSet::new(labels)?;
        for r in rows {
            ps.push(r)?;
        }
        Ok(ps)
    }

    /// Columns labelled `c0, c1, ...`.
    pub fn unlabeled(rows: Vec<Vector>) -> Result<Self, NumericsError> {
        let dim = rows.first().map_or(0, Vec::len);
        PointSet::from_rows((0..dim).map(|i| format!("c{i}")).collect(), rows)
    }

    pub fn push(&mut self, row: Vector) -> Result<(), NumericsError> {
        if row.len() != self.labels.len() {
            return Err(NumericsError::DimensionMismatch {
                expected: self.labels.len(),
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, j: usize) -> Vector {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Keep only `cols`, in the given order.
    pub fn select(&self, cols: &[usize]) -> PointSet {
        PointSet {
            labels: cols.iter().map(|&j| self.labels[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&j| r[j]).collect())
                .collect(),
        }
    }

    /// Rows with exact duplicates removed, first occurrence kept.
    pub fn distinct_rows(&self) -> Vec<Vector> {
        dedup_rows(&self.rows)
    }
}

pub(crate) fn dedup_rows(rows: &[Vector]) -> Vec<Vector> {
    let mut seen = std::collections::HashSet::new();
    rows.iter()
        .filter(|r| seen.insert(r.iter().map(|v| (v + 0.0).to_bits()).collect::<Vec<_>>()))
        .cloned()
        .collect()
}

/// One plus the linear rank of the rows shifted by the first row. Singular
/// values at or below `tol` times the largest one count as zero.
pub fn affine_rank(points: &[Vector], tol: f64) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let dim = first.len();
    if points.len() == 1 || dim == 0 {
        return 1;
    }
    let m = DMatrix::from_fn(points.len() - 1, dim, |i, j| points[i + 1][j] - first[j]);
    1 + matrix_rank(&m, tol)
}

pub(crate) fn matrix_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top <= f64::MIN_POSITIVE {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_two_has_affine_rank_three() {
        let rows = vec![vec![2.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![11.0, 0.0, 0.0]];
        assert_eq!(affine_rank(&rows, RANK_TOL), 3);
    }

    #[test]
    fn repeated_point_has_affine_rank_one() {
        assert_eq!(affine_rank(&[vec![1.0, 2.0]], RANK_TOL), 1);
        assert_eq!(affine_rank(&vec![vec![1.0, 2.0]; 5], RANK_TOL), 1);
    }

    #[test]
    fn collinear_points() {
        let rows: Vec<Vector> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0]).collect();
        assert_eq!(affine_rank(&rows, RANK_TOL), 2);
    }

    #[test]
    fn point_set_rejects_bad_rows() {
        let mut ps = PointSet::new(vec!["a".into(), "b".into()]).unwrap();
        assert!(ps.push(vec![1.0]).is_err());
        assert!(ps.push(vec![1.0, f64::NAN]).is_err());
        assert!(PointSet::new(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn distinct_rows_treats_signed_zero_as_equal() {
        let ps = PointSet::unlabeled(vec![vec![0.0], vec![-0.0], vec![1.0]]).unwrap();
        assert_eq!(ps.distinct_rows().len(), 2);
    }
}
