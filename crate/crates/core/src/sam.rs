//! Boolean preconditions and effects from the SAM inductive rules.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::pddl::{bound_literals, DomainModel, Literal, ParameterBinding, PddlError, Transition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamError {
    #[error("action '{0}' is not declared in the domain")]
    UnknownAction(String),
    #[error(transparent)]
    Grounding(#[from] PddlError),
    #[error("contradictory observations for {action}: {literal} is both an observed effect and false after the action")]
    Contradiction { action: String, literal: String },
}

/// Per-action state of the Boolean learner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActionDraft {
    /// Literals not yet refuted as preconditions.
    pub candidate_pre: BTreeSet<Literal>,
    /// Literals observed to become true.
    pub known_eff: BTreeSet<Literal>,
    /// Literals seen false after some execution; never effects.
    pub ruled_out: BTreeSet<Literal>,
    pub observations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoolModelDraft {
    pub actions: BTreeMap<String, ActionDraft>,
}

impl BoolModelDraft {
    pub fn action(&self, name: &str) -> Option<&ActionDraft> {
        self.actions.get(name)
    }
}

/// Every bound literal is a candidate precondition; no effects are known.
pub fn init_draft(domain: &DomainModel) -> BoolModelDraft {
    BoolModelDraft {
        actions: domain
            .actions
            .iter()
            .map(|a| {
                let draft = ActionDraft {
                    candidate_pre: bound_literals(a, domain).into_iter().collect(),
                    ..Default::default()
                };
                (a.name.clone(), draft)
            })
            .collect(),
    }
}

/// Refine the draft with one transition. `object_type` resolves the types
/// of the transition's objects.
pub fn apply_inductive_rules<'a>(
    draft: &mut BoolModelDraft,
    domain: &DomainModel,
    t: &Transition,
    object_type: impl Fn(&str) -> Option<&'a str>,
) -> Result<(), SamError> {
    let name = &t.action.name;
    let schema = domain
        .action(name)
        .ok_or_else(|| SamError::UnknownAction(name.clone()))?;
    let binding = ParameterBinding::ground(schema, &t.action, domain, object_type)?;
    let entry = draft
        .actions
        .get_mut(name)
        .ok_or_else(|| SamError::UnknownAction(name.clone()))?;
    entry.observations += 1;

    for lit in bound_literals(schema, domain) {
        let g = binding.ground_literal(&lit);
        let before = g.holds(&t.pre);
        let after = g.holds(&t.post);
        if !before {
            entry.candidate_pre.remove(&lit);
        }
        if !after {
            entry.ruled_out.insert(lit.clone());
        } else if !before {
            entry.known_eff.insert(lit.clone());
        }
        // an observed effect that another transition ruled out, or the reverse
        let bad = if after {
            !before && entry.ruled_out.contains(&lit)
        } else {
            entry.known_eff.contains(&lit)
        };
        if bad {
            return Err(SamError::Contradiction {
                action: name.clone(),
                literal: lit.to_string(),
            });
        }
    }
    Ok(())
}
