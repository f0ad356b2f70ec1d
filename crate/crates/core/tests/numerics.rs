mod common;

use common::SimplexOracle;
use nsam_core::numerics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(dim: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (dim, n).prop_flat_map(|(d, n)| prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), n))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_is_orthonormal_and_matches_rank(pts in points(1..=8, 1..=12)) {
        let dim = pts[0].len();
        let shifted: Vec<Vec<f64>> = pts.iter().map(|p| sub(p, &pts[0])).collect();
        let b = find_basis(&shifted, &Basis::empty(dim));
        prop_assert!(b.orthonormality_error() <= 1e-9);
        prop_assert_eq!(affine_rank(&pts, RANK_TOL) - 1, b.len());
        let comp = find_basis(Basis::standard(dim).vectors(), &b);
        prop_assert_eq!(b.len() + comp.len(), dim);
        for u in comp.vectors() {
            for v in b.vectors() {
                prop_assert!(dot(u, v).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn basis_spans_its_points(pts in points(2..=6, 1..=5)) {
        let dim = pts[0].len();
        let b = find_basis(&pts, &Basis::empty(dim));
        for p in &pts {
            let coords = project(p, &b);
            let mut back = vec![0.0; dim];
            for (c, v) in coords.iter().zip(b.vectors()) {
                for (x, y) in back.iter_mut().zip(v) {
                    *x += c * y;
                }
            }
            prop_assert!(norm(&sub(&back, p)) <= 1e-8 * norm(p).max(1.0));
        }
    }

    #[test]
    fn projection_is_linear(pts in points(3..=3, 4..=4), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let b = find_basis(&pts[..2], &Basis::empty(3));
        let (u, v) = (&pts[2], &pts[3]);
        let mix: Vec<f64> = u.iter().zip(v).map(|(x, y)| a * x + c * y).collect();
        let lhs = project(&mix, &b);
        let pu = project(u, &b);
        let pv = project(v, &b);
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * pu[i] + c * pv[i])).abs() <= 1e-12 * (1.0 + lhs[i].abs()) * 100.0);
        }
    }

    #[test]
    fn hull_facets_hold_all_points(pts in points(2..=4, 6..=15)) {
        if let Ok(h) = convex_hull(&pts) {
            for p in &pts {
                for f in &h.facets {
                    prop_assert!(f.contains(p, 1e-7));
                }
            }
            for v in &h.vertices {
                prop_assert!(pts.contains(v));
            }
        }
    }

    #[test]
    fn exact_fits_reproduce_targets(pts in points(1..=4, 1..=8), w in prop::collection::vec(-5.0f64..5.0, 5)) {
        let y: Vec<f64> = pts.iter().map(|r| w[0] + r.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>()).collect();
        let fit = least_squares(&pts, &y);
        prop_assert!((fit.r2 - 1.0).abs() <= 1e-9);
        for (r, t) in pts.iter().zip(&y) {
            prop_assert!((fit.predict(r) - t).abs() <= 1e-9 * t.abs().max(1.0) * 10.0);
        }
    }

    #[test]
    fn removed_columns_are_reconstructed(pts in points(2..=3, 6..=10), w in prop::collection::vec(-3.0f64..3.0, 4)) {
        // append a column that is an affine function of the others
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .map(|r| {
                let mut r = r.clone();
                let extra = w[0] + r.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>();
                r.push(extra);
                r
            })
            .collect();
        let db = PointSet::unlabeled(rows.clone()).unwrap();
        let (kept, deps) = remove_linear_dependencies(&db);
        prop_assert_eq!(kept.len() + deps.len(), db.dim());
        prop_assert!(!deps.is_empty());
        for d in &deps {
            for r in &rows {
                let pred = d.intercept + d.terms.iter().map(|&(c, x)| x * r[c]).sum::<f64>();
                prop_assert!((pred - r[d.column]).abs() <= 1e-7 * r[d.column].abs().max(1.0));
            }
        }
    }
}

#[test]
fn hull_membership_agrees_with_simplex_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=3);
        let n = rng.gen_range(dim + 1..=12);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let hull = convex_hull(&pts).unwrap();
        let oracle = SimplexOracle::new(&pts);
        for _ in 0..50 {
            let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-6.0..6.0)).collect();
            assert_eq!(hull.contains(&q, 1e-9), oracle.contains(&q, 1e-9), "{pts:?} {q:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 10_000);
}

#[test]
fn random_cloud_in_three_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Vec<f64>> = (0..10).map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    let hull = convex_hull(&pts).unwrap();
    let oracle = SimplexOracle::new(&pts);
    for _ in 0..1000 {
        let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.2..1.2)).collect();
        assert_eq!(hull.contains(&q, 1e-9), oracle.contains(&q, 1e-9));
    }
}

#[test]
fn hull_in_eight_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts: Vec<Vec<f64>> = (0..30).map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let hull = convex_hull(&pts).unwrap();
    for p in &pts {
        assert!(hull.contains(p, 1e-7));
    }
    let far = vec![5.0; 8];
    assert!(!hull.contains(&far, 1e-7));
}

#[test]
fn integer_grid_with_coplanar_points() {
    let mut pts = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..3 {
                pts.push(vec![x as f64, y as f64, z as f64]);
            }
        }
    }
    let h = convex_hull(&pts).unwrap();
    assert_eq!(h.facets.len(), 6);
    assert_eq!(h.vertices.len(), 8);
}
