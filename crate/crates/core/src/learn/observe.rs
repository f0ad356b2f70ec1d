//! Per-action observation matrices built in one pass over the trajectories.

use std::collections::BTreeMap;

use super::monomial::{monomials, Monomial};
use super::{LearnConfig, LearnError};
use crate::numerics::PointSet;
use crate::pddl::{bound_functions, DomainModel, FunctionTerm, ParameterBinding, State, Trajectory};
use crate::sam::{apply_inductive_rules, init_draft, BoolModelDraft};

/// Row-aligned pre/post observations of one lifted action.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionObservations {
    /// The action's bound functions, in declaration order.
    pub functions: Vec<FunctionTerm>,
    /// Pre-state columns: monomials over `functions`.
    pub columns: Vec<Monomial>,
    /// Pre-state function values, one row per occurrence.
    pub raw_pre: Vec<Vec<f64>>,
    /// Pre-state column values.
    pub pre: PointSet,
    /// Post-state function values.
    pub post: PointSet,
}

impl ActionObservations {
    fn new(functions: Vec<FunctionTerm>, columns: Vec<Monomial>) -> Self {
        let names = function_labels(&functions);
        let labels: Vec<String> = columns.iter().map(|m| m.label(&names)).collect();
        ActionObservations {
            pre: PointSet::new(labels).expect("monomial labels are unique"),
            post: PointSet::new(names).expect("bound functions are unique"),
            functions,
            columns,
            raw_pre: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.raw_pre.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_pre.is_empty()
    }

    /// Column values for a vector of function values.
    pub fn column_values(&self, function_values: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|m| m.value(function_values)).collect()
    }

    pub fn column_labels(&self) -> &[String] {
        self.pre.labels()
    }
}

pub(crate) fn function_labels(functions: &[FunctionTerm]) -> Vec<String> {
    functions.iter().map(|f| f.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationDb {
    pub actions: BTreeMap<String, ActionObservations>,
    pub draft: BoolModelDraft,
}

impl ObservationDb {
    pub fn action(&self, name: &str) -> Option<&ActionObservations> {
        self.actions.get(name)
    }
}

fn grounded_values(
    state: &State,
    functions: &[FunctionTerm],
    binding: &ParameterBinding,
    action: &str,
) -> Result<Vec<f64>, LearnError> {
    functions
        .iter()
        .map(|f| {
            state
                .value(&binding.ground_atom(f))
                .ok_or_else(|| LearnError::MissingValue {
                    action: action.to_string(),
                    function: binding.ground_atom(f).to_string(),
                })
        })
        .collect()
}

/// Collect the observation matrices and the Boolean draft of every action.
pub fn build_observation_dbs(
    trajectories: &[Trajectory],
    domain: &DomainModel,
    config: &LearnConfig,
) -> Result<ObservationDb, LearnError> {
    config.validate()?;
    let mut actions = BTreeMap::new();
    if let Some(rf) = &config.relevant_functions {
        if let Some(name) = rf.keys().find(|a| domain.action(a).is_none()) {
            return Err(LearnError::Config(format!(
                "relevant functions name unknown action '{name}'"
            )));
        }
    }
    for schema in &domain.actions {
        let functions = bound_functions(schema, domain);
        let names = function_labels(&functions);
        let mut columns = monomials(functions.len(), config.degree);
        if let Some(keep) = config
            .relevant_functions
            .as_ref()
            .and_then(|rf| rf.get(&schema.name))
        {
            let labels: Vec<String> = columns.iter().map(|m| m.label(&names)).collect();
            for l in keep {
                if !labels.contains(l) {
                    return Err(LearnError::UnknownRelevantLabel {
                        action: schema.name.clone(),
                        label: l.clone(),
                    });
                }
            }
            columns.retain(|m| keep.contains(&m.label(&names)));
        }
        actions.insert(schema.name.clone(), ActionObservations::new(functions, columns));
    }

    let mut draft = init_draft(domain);
    for traj in trajectories {
        for t in traj.transitions() {
            apply_inductive_rules(&mut draft, domain, t, |o| traj.object_type(o))?;
            let schema = domain.action(&t.action.name).expect("checked by the rules");
            let binding = ParameterBinding::ground(schema, &t.action, domain, |o| traj.object_type(o))?;
            let obs = actions.get_mut(&schema.name).expect("every action has an entry");
            let pre = grounded_values(&t.pre, &obs.functions, &binding, &schema.name)?;
            let post = grounded_values(&t.post, &obs.functions, &binding, &schema.name)?;
            let cols = obs.column_values(&pre);
            let bad = |e| LearnError::Numerics {
                action: schema.name.clone(),
                source: e,
            };
            obs.pre.push(cols).map_err(bad)?;
            obs.post.push(post).map_err(bad)?;
            obs.raw_pre.push(pre);
        }
    }
    Ok(ObservationDb { actions, draft })
}
