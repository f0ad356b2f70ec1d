//! Learned action models, region membership and PDDL emission.

use std::collections::{BTreeMap, BTreeSet};

use super::monomial::Monomial;
use super::nsam_star::SubspaceModel;
use super::observe::{ActionObservations, ObservationDb};
use super::{LearnConfig, LearnError};
use crate::numerics::{least_squares, Dependency, Hull};
use crate::pddl::{
    serialize_domain_with_header, ActionSchema, AssignOp, Comparison, DomainModel, FunctionTerm,
    GroundAction, Literal, NumericCondition, NumericEffect, NumericExpr, ParameterBinding, State,
};
use crate::precision::round_to;

/// Coefficients at or below this magnitude are dropped from emitted terms.
const COEFF_EPS: f64 = 1e-12;

/// `target := intercept + sum(weight * column)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEffect {
    pub target: FunctionTerm,
    /// Index of the target among the action's functions.
    pub function: usize,
    pub intercept: f64,
    /// (column index, weight)
    pub terms: Vec<(usize, f64)>,
}

impl LinearEffect {
    pub fn predict(&self, columns: &[f64]) -> f64 {
        self.intercept + self.terms.iter().map(|&(c, w)| w * columns[c]).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preconditions {
    /// Full-dimensional hull over `kept` columns; the other columns are
    /// pinned by `dependencies`. `hull` is `None` when no column is kept.
    Hull {
        kept: Vec<usize>,
        hull: Option<Hull>,
        dependencies: Vec<Dependency>,
    },
    /// Hull inside the affine subspace spanned by the observations.
    Subspace(SubspaceModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericModel {
    pub functions: Vec<FunctionTerm>,
    pub columns: Vec<Monomial>,
    pub labels: Vec<String>,
    pub preconditions: Preconditions,
    pub effects: Vec<LinearEffect>,
}

impl NumericModel {
    pub fn column_values(&self, function_values: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|m| m.value(function_values)).collect()
    }

    /// Whether column values satisfy the preconditions, with relative slack
    /// `tol`.
    pub fn contains_columns(&self, x: &[f64], tol: f64) -> bool {
        match &self.preconditions {
            Preconditions::Hull {
                kept,
                hull,
                dependencies,
            } => {
                let deps_ok = dependencies.iter().all(|d| {
                    let want = d.intercept + d.terms.iter().map(|&(c, w)| w * x[c]).sum::<f64>();
                    (x[d.column] - want).abs() <= tol * want.abs().max(1.0)
                });
                let sub: Vec<f64> = kept.iter().map(|&c| x[c]).collect();
                deps_ok && hull.as_ref().is_none_or(|h| h.contains(&sub, tol))
            }
            Preconditions::Subspace(m) => m.contains(x, tol),
        }
    }

    pub fn contains(&self, function_values: &[f64], tol: f64) -> bool {
        self.contains_columns(&self.column_values(function_values), tol)
    }

    /// Post-state function values; functions without a learned effect keep
    /// their value.
    pub fn predict(&self, function_values: &[f64]) -> Vec<f64> {
        let x = self.column_values(function_values);
        let mut out = function_values.to_vec();
        for e in &self.effects {
            out[e.function] = e.predict(&x);
        }
        out
    }

    fn column_expr(&self, c: usize) -> NumericExpr {
        let m = &self.columns[c];
        m.factors
            .iter()
            .map(|&f| NumericExpr::func(self.functions[f].clone()))
            .reduce(NumericExpr::mul)
            .expect("monomials have at least one factor")
    }

    /// Numeric preconditions with unit-normalized, unrounded coefficients.
    pub fn conditions(&self) -> Vec<NumericCondition> {
        match &self.preconditions {
            Preconditions::Hull {
                kept,
                hull,
                dependencies,
            } => {
                let mut out = Vec::new();
                for d in dependencies {
                    let lhs = NumericExpr::sum(
                        std::iter::once(self.column_expr(d.column)).chain(
                            d.terms
                                .iter()
                                .map(|&(c, w)| NumericExpr::mul(self.column_expr(c), NumericExpr::Const(-w))),
                        ),
                    )
                    .expect("non-empty");
                    out.push(NumericCondition::new(lhs, Comparison::Eq, d.intercept));
                }
                for f in hull.iter().flat_map(|h| &h.facets) {
                    let u = f.unit();
                    let lhs = NumericExpr::sum(
                        kept.iter()
                            .zip(&u.normal)
                            .filter(|(_, n)| n.abs() > COEFF_EPS)
                            .map(|(&c, &n)| NumericExpr::mul(self.column_expr(c), NumericExpr::Const(n))),
                    );
                    if let Some(lhs) = lhs {
                        out.push(NumericCondition::new(lhs, Comparison::Le, u.offset));
                    }
                }
                out
            }
            Preconditions::Subspace(m) => {
                let cols: Vec<NumericExpr> = (0..self.columns.len()).map(|c| self.column_expr(c)).collect();
                super::nsam_star::subspace_conditions(m, &cols)
            }
        }
    }

    pub fn effect_exprs(&self) -> Vec<NumericEffect> {
        self.effects
            .iter()
            .map(|e| {
                let terms = e
                    .terms
                    .iter()
                    .map(|&(c, w)| NumericExpr::mul(self.column_expr(c), NumericExpr::Const(w)));
                let constant = (e.intercept != 0.0 || e.terms.is_empty()).then_some(NumericExpr::Const(e.intercept));
                NumericEffect {
                    target: e.target.clone(),
                    op: AssignOp::Assign,
                    expr: NumericExpr::sum(terms.chain(constant)).expect("non-empty"),
                }
            })
            .collect()
    }
}

/// Fit one exact affine effect per function that changes in the data.
pub(crate) fn fit_effects(obs: &ActionObservations, action: &str, tol: f64) -> Result<Vec<LinearEffect>, LearnError> {
    let x = obs.pre.rows();
    let mut out = Vec::new();
    for (j, target) in obs.functions.iter().enumerate() {
        let y = obs.post.column(j);
        if obs.raw_pre.iter().zip(&y).all(|(r, v)| r[j] == *v) {
            continue;
        }
        let fit = least_squares(x, &y);
        if !fit.is_exact(&y, tol) {
            return Err(LearnError::InconsistentEffects {
                action: action.to_string(),
                function: target.to_string(),
                residual: fit.max_residual,
            });
        }
        let full = LinearEffect {
            target: target.clone(),
            function: j,
            intercept: fit.intercept,
            terms: fit.weights.iter().copied().enumerate().collect(),
        };
        let pruned = LinearEffect {
            terms: full.terms.iter().copied().filter(|(_, w)| w.abs() > 1e-10).collect(),
            ..full.clone()
        };
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let pruned_ok = x.iter().zip(&y).all(|(r, v)| (pruned.predict(r) - v).abs() <= tol * scale);
        out.push(if pruned_ok { pruned } else { full });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedAction {
    pub name: String,
    pub safe: bool,
    pub bool_pre: BTreeSet<Literal>,
    pub bool_eff: BTreeSet<Literal>,
    /// `None` for unsafe actions.
    pub numeric: Option<NumericModel>,
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedModel {
    pub algorithm: String,
    /// Declarations the model was learned against.
    pub domain: DomainModel,
    pub actions: BTreeMap<String, LearnedAction>,
    /// Actions left out of the learned domain, in declaration order.
    pub unsafe_actions: Vec<String>,
    pub observations: ObservationDb,
    pub config: LearnConfig,
    pub trajectories: usize,
}

impl LearnedModel {
    pub fn action(&self, name: &str) -> Option<&LearnedAction> {
        self.actions.get(name)
    }

    pub fn is_safe(&self, name: &str) -> bool {
        self.action(name).is_some_and(|a| a.safe)
    }

    /// Values of the action's bound functions in `state`, in the order of
    /// its learned columns' source functions.
    pub fn function_values(&self, state: &State, action: &GroundAction) -> Option<Vec<f64>> {
        let schema = self.domain.action(&action.name)?;
        let obs = self.observations.action(&action.name)?;
        let b = ParameterBinding::ground(schema, action, &self.domain, |_| None).ok()?;
        obs.functions
            .iter()
            .map(|f| state.value(&b.ground_atom(f)))
            .collect()
    }

    /// Numeric preconditions of a safe action hold in `state` (relative
    /// slack `tol`). Boolean preconditions are not checked.
    pub fn numeric_applicable(&self, state: &State, action: &GroundAction, tol: f64) -> Option<bool> {
        let m = self.action(&action.name)?.numeric.as_ref()?;
        Some(m.contains(&self.function_values(state, action)?, tol))
    }

    /// The learned domain: safe actions only, constants rounded to the
    /// configured precision so that printing loses nothing further.
    pub fn to_domain(&self) -> DomainModel {
        let k = self.config.digits;
        let mut out = DomainModel {
            actions: Vec::new(),
            ..self.domain.clone()
        };
        for schema in &self.domain.actions {
            let Some(a) = self.actions.get(&schema.name).filter(|a| a.safe) else {
                continue;
            };
            let m = a.numeric.as_ref().expect("safe actions carry a numeric model");
            let mut learned = ActionSchema::new(schema.name.clone(), schema.params.clone());
            learned.bool_pre = a.bool_pre.clone();
            learned.bool_eff = a.bool_eff.clone();
            learned.num_pre = m
                .conditions()
                .into_iter()
                .map(|c| round_condition(&c, k))
                .collect();
            learned.num_eff = m
                .effect_exprs()
                .into_iter()
                .map(|e| NumericEffect {
                    expr: round_consts(&e.expr, k),
                    ..e
                })
                .collect();
            out.actions.push(learned);
        }
        out
    }
}

pub(crate) fn round_condition(c: &NumericCondition, digits: u32) -> NumericCondition {
    NumericCondition::new(round_consts(&c.lhs, digits), c.rel, round_to(c.rhs, digits))
}

fn round_consts(e: &NumericExpr, digits: u32) -> NumericExpr {
    match e {
        NumericExpr::Const(c) => NumericExpr::Const(round_to(*c, digits)),
        NumericExpr::Func(_) => e.clone(),
        NumericExpr::Binary(op, a, b) => {
            NumericExpr::binary(*op, round_consts(a, digits), round_consts(b, digits))
        }
    }
}

/// Learned domain text with a comment header naming the learner and the
/// excluded actions.
pub fn serialize_learned(model: &LearnedModel) -> String {
    let transitions: usize = model.observations.actions.values().map(|o| o.len()).sum();
    let unsafe_list = if model.unsafe_actions.is_empty() {
        "none".to_string()
    } else {
        model.unsafe_actions.join(", ")
    };
    let header = vec![
        format!(
            "learned by {} from {} trajectories ({} transitions)",
            model.algorithm, model.trajectories, transitions
        ),
        format!("unsafe actions: {unsafe_list}"),
        format!("polynomial degree {}, {} decimal digits", model.config.degree, model.config.digits),
    ];
    serialize_domain_with_header(&model.to_domain(), model.config.digits, &header)
}
