use nalgebra::{DMatrix, DVector};

use super::{matrix_rank, PointSet, RANK_TOL};

/// Affine fit `y ~ intercept + weights . x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub r2: f64,
    /// Largest absolute residual on the training rows.
    pub max_residual: f64,
}

impl Regression {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Every training residual is within `tol * max(1, max|y|)`.
    pub fn is_exact(&self, y: &[f64], tol: f64) -> bool {
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        self.max_residual <= tol * scale
    }
}

/// Least squares with intercept. Columns are centered first, so the weights
/// are the minimum-norm solution whenever the system is underdetermined; a
/// constant target therefore gets all-zero weights.
pub fn least_squares(x: &[Vec<f64>], y: &[f64]) -> Regression {
    assert_eq!(x.len(), y.len(), "row count differs from target length");
    let n = y.len();
    let m = x.first().map_or(0, Vec::len);
    if n == 0 {
        return Regression {
            intercept: 0.0,
            weights: vec![0.0; m],
            r2: 1.0,
            max_residual: 0.0,
        };
    }
    let ybar = y.iter().sum::<f64>() / n as f64;
    let means: Vec<f64> = (0..m)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();

    let weights = if m == 0 {
        Vec::new()
    } else {
        let a = DMatrix::from_fn(n, m, |i, j| x[i][j] - means[j]);
        let b = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
        let svd = a.svd(true, true);
        let top = svd.singular_values.max();
        if top <= f64::MIN_POSITIVE {
            vec![0.0; m]
        } else {
            let w = svd
                .solve(&b, RANK_TOL * top)
                .expect("both singular factors were requested");
            w.iter().copied().collect()
        }
    };
    let intercept = ybar - weights.iter().zip(&means).map(|(w, mu)| w * mu).sum::<f64>();

    let mut fit = Regression {
        intercept,
        weights,
        r2: 1.0,
        max_residual: 0.0,
    };
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (row, &target) in x.iter().zip(y) {
        let r = target - fit.predict(row);
        fit.max_residual = fit.max_residual.max(r.abs());
        ss_res += r * r;
        ss_tot += (target - ybar) * (target - ybar);
    }
    let tiny = 1e-24 * (1.0 + ybar * ybar) * n as f64;
    fit.r2 = if ss_tot <= tiny {
        if ss_res <= tiny {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    fit
}

/// A column that the observations determine exactly from the kept columns:
/// `column = intercept + sum(coeff * kept column)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dependency {
    pub column: usize,
    pub intercept: f64,
    /// Pairs of (original column index, coefficient), zero terms omitted.
    pub terms: Vec<(usize, f64)>,
}

/// Residual tolerance (relative to the column scale) for accepting a column
/// as an affine function of the others.
const DEPENDENCY_TOL: f64 = 1e-9;

/// Split the columns of `db` into kept columns and columns fully determined
/// by them. Columns are examined from last to first, so earlier columns are
/// preferred. A column is only removed when the data carries evidence for
/// the relation, i.e. there are more distinct rows than the affine rank of
/// the other kept columns; with fewer rows any column interpolates exactly
/// and the fit says nothing about the action.
pub fn remove_linear_dependencies(db: &PointSet) -> (Vec<usize>, Vec<Dependency>) {
    let mut kept: Vec<usize> = (0..db.dim()).collect();
    let mut deps = Vec::new();
    let rows = db.distinct_rows();
    if rows.is_empty() {
        return (kept, deps);
    }
    for j in (0..db.dim()).rev() {
        let rest: Vec<usize> = kept.iter().copied().filter(|&c| c != j).collect();
        let x: Vec<Vec<f64>> = rows.iter().map(|r| rest.iter().map(|&c| r[c]).collect()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let with_ones = DMatrix::from_fn(rows.len(), rest.len() + 1, |i, c| {
            if c == 0 {
                1.0
            } else {
                x[i][c - 1]
            }
        });
        if rows.len() <= matrix_rank(&with_ones, RANK_TOL) {
            continue;
        }
        let fit = least_squares(&x, &y);
        if !fit.is_exact(&y, DEPENDENCY_TOL) {
            continue;
        }
        let terms = rest
            .iter()
            .zip(&fit.weights)
            .filter(|(_, w)| w.abs() > 1e-12)
            .map(|(&c, &w)| (c, w))
            .collect();
        deps.push(Dependency {
            column: j,
            intercept: fit.intercept,
            terms,
        });
        kept = rest;
    }
    deps.reverse();
    (kept, deps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_generator_on_determined_system() {
        let x = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let y: Vec<f64> = x.iter().map(|r| -1.0 + r[0]).collect();
        let fit = least_squares(&x, &y);
        assert!((fit.intercept + 1.0).abs() < 1e-9);
        assert!((fit.weights[0] - 1.0).abs() < 1e-9);
        assert!(fit.weights[1].abs() < 1e-9 && fit.weights[2].abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_target_gets_zero_weights() {
        let x = vec![vec![1.0, 5.0], vec![2.0, -3.0], vec![7.0, 0.5]];
        let fit = least_squares(&x, &[4.0, 4.0, 4.0]);
        assert_eq!(fit.intercept, 4.0);
        assert!(fit.weights.iter().all(|w| w.abs() < 1e-15));
        assert_eq!(fit.r2, 1.0);
    }

    #[test]
    fn table_two_effect_interpolates() {
        let x = vec![vec![2.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![11.0, 0.0, 0.0]];
        let y = [1.0, 0.0, 10.0];
        let fit = least_squares(&x, &y);
        assert!(fit.is_exact(&y, 1e-9));
        for (r, t) in x.iter().zip(y) {
            assert!((fit.predict(r) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn single_row_is_constant() {
        let fit = least_squares(&[vec![3.0, 4.0]], &[2.5]);
        assert_eq!(fit.intercept, 2.5);
        assert_eq!(fit.weights, vec![0.0, 0.0]);
    }

    fn ps(rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::unlabeled(rows).unwrap()
    }

    #[test]
    fn symmetric_distance_columns() {
        let db = ps(vec![vec![1.0, 1.0], vec![2.5, 2.5], vec![4.0, 4.0]]);
        let (kept, deps) = remove_linear_dependencies(&db);
        assert_eq!(kept, vec![0]);
        assert_eq!(deps.len(), 1);
        assert_eq!(deps[0].column, 1);
        assert!(deps[0].intercept.abs() < 1e-9);
        assert_eq!(deps[0].terms.len(), 1);
        assert!((deps[0].terms[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_column() {
        let db = ps(vec![vec![1.0, 7.0], vec![2.0, 7.0], vec![5.0, 7.0]]);
        let (kept, deps) = remove_linear_dependencies(&db);
        assert_eq!(kept, vec![0]);
        assert_eq!(deps, vec![Dependency { column: 1, intercept: 7.0, terms: vec![] }]);
    }

    #[test]
    fn independent_columns_stay() {
        let db = ps(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(remove_linear_dependencies(&db), (vec![0, 1], vec![]));
    }

    #[test]
    fn too_few_rows_are_no_evidence() {
        // (x f2) is constant but three points interpolate any column
        let db = ps(vec![vec![2.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![11.0, 0.0, 0.0]]);
        assert_eq!(remove_linear_dependencies(&db).0, vec![0, 1, 2]);
    }
}
