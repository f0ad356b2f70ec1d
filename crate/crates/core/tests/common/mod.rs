#![allow(dead_code)]

use std::path::PathBuf;

use nsam_core::eval::Simulator;
use nsam_core::pddl::{parse_domain, parse_trajectory, Atom, DomainModel, GroundAction, State, Trajectory, TypedName};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn farmland() -> DomainModel {
    parse_domain(&fixture("farmland.pddl")).unwrap()
}

/// Three single-step move-slow trajectories whose pre-states are
/// (2,0,1), (1,0,1) and (11,0,0) over ((x f1), (x f2), (cost)).
pub fn move_slow_observations(domain: &DomainModel) -> Vec<Trajectory> {
    (1..=3)
        .map(|i| parse_trajectory(&fixture(&format!("move-slow-{i}.traj")), domain).unwrap())
        .collect()
}

/// A farmland state over farms f1, f2 with (adj f1 f2).
pub fn farm_state(x1: f64, x2: f64, cost: f64) -> State {
    let mut s = State::default();
    s.atoms.insert(Atom::new("adj", ["f1", "f2"]));
    s.values.insert(Atom::new("x", ["f1"]), x1);
    s.values.insert(Atom::new("x", ["f2"]), x2);
    s.values.insert(Atom::new("cost", Vec::<String>::new()), cost);
    s
}

pub fn farm_objects() -> Vec<TypedName> {
    vec![TypedName::new("f1", "farm"), TypedName::new("f2", "farm")]
}

/// One single-step trajectory per pre-state, with the post-state computed
/// by the ground truth.
pub fn single_steps(truth: &DomainModel, objects: &[TypedName], action: &GroundAction, pres: &[State]) -> Vec<Trajectory> {
    let sim = Simulator::strict(truth);
    pres.iter()
        .map(|s| {
            assert!(sim.applicable(s, action).unwrap(), "{action} not applicable");
            let mut t = Trajectory::new(objects.to_vec(), s.clone());
            t.push(action.clone(), sim.apply_unchecked(s, action).unwrap());
            t
        })
        .collect()
}

/// Membership in the convex hull of `points` (full-dimensional) by
/// exhaustive search over simplices: a point lies in the hull iff it has
/// nonnegative barycentric coordinates in some simplex of `dim + 1` input
/// points.
pub struct SimplexOracle {
    /// Inverses of [p_0 .. p_d; 1 .. 1] for every nondegenerate simplex.
    inverses: Vec<nalgebra::DMatrix<f64>>,
    dim: usize,
}

impl SimplexOracle {
    pub fn new(points: &[Vec<f64>]) -> Self {
        let dim = points[0].len();
        let mut inverses = Vec::new();
        let mut idx: Vec<usize> = (0..=dim).collect();
        let n = points.len();
        if n < dim + 1 {
            return SimplexOracle { inverses, dim };
        }
        loop {
            let m = nalgebra::DMatrix::from_fn(dim + 1, dim + 1, |r, c| {
                if r == dim {
                    1.0
                } else {
                    points[idx[c]][r]
                }
            });
            if m.determinant().abs() > 1e-9 {
                if let Some(inv) = m.try_inverse() {
                    inverses.push(inv);
                }
            }
            // next combination
            let mut i = dim + 1;
            loop {
                if i == 0 {
                    return SimplexOracle { inverses, dim };
                }
                i -= 1;
                if idx[i] < n - (dim + 1 - i) {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..=dim {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    pub fn contains(&self, q: &[f64], tol: f64) -> bool {
        let mut rhs = nalgebra::DVector::from_element(self.dim + 1, 1.0);
        for (i, v) in q.iter().enumerate() {
            rhs[i] = *v;
        }
        self.inverses
            .iter()
            .any(|inv| (inv * &rhs).iter().all(|&l| l >= -tol))
    }
}
