//! Full-dimensional hull preconditions with exact affine effects.

use super::model::{fit_effects, LearnedAction, LearnedModel, NumericModel, Preconditions};
use super::observe::{build_observation_dbs, ActionObservations, ObservationDb};
use super::{par_map, LearnConfig, LearnError, Learner};
use crate::numerics::{affine_rank, convex_hull, remove_linear_dependencies, NumericsError};
use crate::pddl::{DomainModel, Trajectory};

/// Admits an action only when its observations, after dropping columns they
/// determine exactly, span a full-dimensional region.
pub struct NSam;

impl Learner for NSam {
    fn name(&self) -> &'static str {
        "nsam"
    }

    fn description(&self) -> &'static str {
        "convex-hull preconditions; actions without full-rank observations are left out"
    }

    fn learn(
        &self,
        domain: &DomainModel,
        trajectories: &[Trajectory],
        config: &LearnConfig,
    ) -> Result<LearnedModel, LearnError> {
        learn_nsam(domain, trajectories, config, self.name())
    }
}

pub(crate) fn learn_nsam(
    domain: &DomainModel,
    trajectories: &[Trajectory],
    config: &LearnConfig,
    algorithm: &str,
) -> Result<LearnedModel, LearnError> {
    let db = build_observation_dbs(trajectories, domain, config)?;
    let names: Vec<&str> = domain.actions.iter().map(|a| a.name.as_str()).collect();
    let learned = par_map(&names, config.jobs, |name| learn_action(name, &db, config));
    let mut actions = std::collections::BTreeMap::new();
    for a in learned {
        let a = a?;
        actions.insert(a.name.clone(), a);
    }
    let unsafe_actions = names
        .iter()
        .filter(|n| !actions[**n].safe)
        .map(|n| n.to_string())
        .collect();
    Ok(LearnedModel {
        algorithm: algorithm.to_string(),
        domain: domain.clone(),
        actions,
        unsafe_actions,
        observations: db,
        config: config.clone(),
        trajectories: trajectories.len(),
    })
}

pub(crate) fn unsafe_action(name: &str, db: &ObservationDb) -> LearnedAction {
    let draft = db.draft.action(name).cloned().unwrap_or_default();
    LearnedAction {
        name: name.to_string(),
        safe: false,
        bool_pre: draft.candidate_pre,
        bool_eff: draft.known_eff,
        numeric: None,
        observations: draft.observations,
    }
}

fn learn_action(name: &str, db: &ObservationDb, config: &LearnConfig) -> Result<LearnedAction, LearnError> {
    let mut out = unsafe_action(name, db);
    let obs = &db.actions[name];
    if obs.is_empty() {
        return Ok(out);
    }
    let Some(pre) = hull_preconditions(obs, config, name)? else {
        return Ok(out);
    };
    // an effect that is not an exact affine function cannot be trusted
    let Ok(effects) = fit_effects(obs, name, config.effect_tol) else {
        return Ok(out);
    };
    out.safe = true;
    out.numeric = Some(NumericModel {
        functions: obs.functions.clone(),
        columns: obs.columns.clone(),
        labels: obs.column_labels().to_vec(),
        preconditions: pre,
        effects,
    });
    Ok(out)
}

/// Hull preconditions, or `None` when the observations are too few.
pub(crate) fn hull_preconditions(
    obs: &ActionObservations,
    config: &LearnConfig,
    name: &str,
) -> Result<Option<Preconditions>, LearnError> {
    let (kept, dependencies) = remove_linear_dependencies(&obs.pre);
    let rows = obs.pre.select(&kept).distinct_rows();
    if affine_rank(&rows, config.rank_tol) < kept.len() + 1 {
        return Ok(None);
    }
    if kept.is_empty() {
        return Ok(Some(Preconditions::Hull {
            kept,
            hull: None,
            dependencies,
        }));
    }
    match convex_hull(&rows) {
        Ok(hull) => Ok(Some(Preconditions::Hull {
            kept,
            hull: Some(hull),
            dependencies,
        })),
        Err(NumericsError::Degenerate { .. }) => Ok(None),
        Err(source) => Err(LearnError::Numerics {
            action: name.to_string(),
            source,
        }),
    }
}
