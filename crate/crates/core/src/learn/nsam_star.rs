//! Hull preconditions restricted to the affine subspace of the observations.

use super::model::{fit_effects, round_condition, LinearEffect, NumericModel, Preconditions};
use super::nsam::learn_nsam;
use super::observe::ActionObservations;
use super::{par_map, LearnConfig, LearnError, LearnedModel, Learner};
use crate::numerics::{
    convex_hull, find_basis, project, sub, Basis, Hull, NumericsError, PointSet, Vector,
};
use crate::pddl::{Comparison, DomainModel, NumericCondition, NumericExpr, Trajectory};

/// Runs `nsam`, then learns every observed action it left out inside the
/// subspace its observations span.
pub struct NSamStar;

impl Learner for NSamStar {
    fn name(&self) -> &'static str {
        "nsam-star"
    }

    fn description(&self) -> &'static str {
        "like nsam, plus subspace-restricted preconditions for actions with low-rank observations"
    }

    fn learn(
        &self,
        domain: &DomainModel,
        trajectories: &[Trajectory],
        config: &LearnConfig,
    ) -> Result<LearnedModel, LearnError> {
        let mut model = learn_nsam(domain, trajectories, config, self.name())?;
        let pending: Vec<String> = model
            .unsafe_actions
            .iter()
            .filter(|n| !model.observations.actions[*n].is_empty())
            .cloned()
            .collect();
        let db = &model.observations;
        let results = par_map(&pending, config.jobs, |name| {
            learn_subspace_action(&db.actions[name], name, config)
        });
        for (name, res) in pending.iter().zip(results) {
            if let Some(numeric) = res? {
                let a = model.actions.get_mut(name).expect("pending actions exist");
                a.safe = true;
                a.numeric = Some(numeric);
            }
        }
        let actions = &model.actions;
        model.unsafe_actions.retain(|n| !actions[n].safe);
        Ok(model)
    }
}

fn learn_subspace_action(
    obs: &ActionObservations,
    name: &str,
    config: &LearnConfig,
) -> Result<Option<NumericModel>, LearnError> {
    let sub = match build_subspace(&obs.pre) {
        Ok(s) => s,
        Err(NumericsError::Degenerate { .. }) => return Ok(None),
        Err(source) => {
            return Err(LearnError::Numerics {
                action: name.to_string(),
                source,
            })
        }
    };
    let effects = learn_effects_star(obs, name, config)?;
    Ok(Some(NumericModel {
        functions: obs.functions.clone(),
        columns: obs.columns.clone(),
        labels: obs.column_labels().to_vec(),
        preconditions: Preconditions::Subspace(sub),
        effects,
    }))
}

/// Observations expressed relative to the first one, inside the subspace
/// they span.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    pub anchor: Vector,
    pub basis: Basis,
    pub comp_basis: Basis,
    /// Hull of the projected observations; `None` when `basis` is empty.
    pub hull: Option<Hull>,
}

impl SubspaceModel {
    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Coordinates of `x - anchor` along the basis.
    pub fn project(&self, x: &[f64]) -> Vector {
        project(&sub(x, &self.anchor), &self.basis)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let s = sub(x, &self.anchor);
        let scale = self.anchor.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let on_subspace = self
            .comp_basis
            .vectors()
            .iter()
            .all(|u| crate::numerics::dot(u, &s).abs() <= tol * scale);
        on_subspace
            && self
                .hull
                .as_ref()
                .is_none_or(|h| h.contains(&project(&s, &self.basis), tol))
    }
}

/// Anchor at the first row, orthonormal basis of the shifted rows and of the
/// complement, and the hull in basis coordinates.
pub fn build_subspace(pre: &PointSet) -> Result<SubspaceModel, NumericsError> {
    let anchor = pre.rows().first().ok_or(NumericsError::Empty)?.clone();
    let dim = anchor.len();
    let shifted: Vec<Vector> = pre.rows().iter().map(|r| sub(r, &anchor)).collect();
    let basis = find_basis(&shifted, &Basis::empty(dim));
    let comp_basis = find_basis(Basis::standard(dim).vectors(), &basis);
    let hull = if basis.is_empty() {
        None
    } else {
        let projected: Vec<Vector> = shifted.iter().map(|s| project(s, &basis)).collect();
        Some(convex_hull(&projected)?)
    };
    Ok(SubspaceModel {
        anchor,
        basis,
        comp_basis,
        hull,
    })
}

/// Components at or below this magnitude are treated as zero when building
/// expressions.
const COMPONENT_EPS: f64 = 1e-9;

/// `column - anchor`, or just the column when the anchor value is zero.
fn shifted_expr(col: &NumericExpr, anchor: f64) -> NumericExpr {
    if anchor == 0.0 {
        col.clone()
    } else {
        NumericExpr::sub(col.clone(), NumericExpr::Const(anchor))
    }
}

fn combination(weights: &[f64], parts: &[NumericExpr]) -> Option<NumericExpr> {
    NumericExpr::sum(
        weights
            .iter()
            .zip(parts)
            .filter(|(w, _)| w.abs() > COMPONENT_EPS)
            .map(|(&w, e)| NumericExpr::mul(e.clone(), NumericExpr::Const(w))),
    )
}

/// Unrounded conditions over the given column expressions.
pub(crate) fn subspace_conditions(m: &SubspaceModel, cols: &[NumericExpr]) -> Vec<NumericCondition> {
    let shifted: Vec<NumericExpr> = cols
        .iter()
        .zip(&m.anchor)
        .map(|(c, &a)| shifted_expr(c, a))
        .collect();
    let mut out = Vec::new();
    for u in m.comp_basis.vectors() {
        let nonzero: Vec<usize> = (0..u.len()).filter(|&i| u[i].abs() > COMPONENT_EPS).collect();
        if let [i] = nonzero[..] {
            out.push(NumericCondition::new(cols[i].clone(), Comparison::Eq, m.anchor[i]));
        } else if let Some(lhs) = combination(u, &shifted) {
            out.push(NumericCondition::new(lhs, Comparison::Eq, 0.0));
        }
    }
    let coords: Vec<NumericExpr> = m
        .basis
        .vectors()
        .iter()
        .map(|b| combination(b, &shifted).expect("basis vectors are nonzero"))
        .collect();
    for f in m.hull.iter().flat_map(|h| &h.facets) {
        let u = f.unit();
        if let Some(lhs) = combination(&u.normal, &coords) {
            out.push(NumericCondition::new(lhs, Comparison::Le, u.offset));
        }
    }
    out
}

/// Preconditions of a subspace model over the given column expressions,
/// with constants rounded to `digits`.
pub fn create_preconditions(m: &SubspaceModel, cols: &[NumericExpr], digits: u32) -> Vec<NumericCondition> {
    subspace_conditions(m, cols)
        .iter()
        .map(|c| round_condition(c, digits))
        .collect()
}

/// Minimum-norm effects; any effect that does not fit the observations
/// exactly is an error.
pub fn learn_effects_star(
    obs: &ActionObservations,
    action: &str,
    config: &LearnConfig,
) -> Result<Vec<LinearEffect>, LearnError> {
    fit_effects(obs, action, config.effect_tol)
}
