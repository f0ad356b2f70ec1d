//! Labelled state/action pairs from random walks under the ground truth.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sim::Simulator;
use super::EvalError;
use crate::pddl::{groundings, DomainModel, GroundAction, Problem, State};

/// States visited while looking for one inapplicable slot.
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSetConfig {
    pub seed: u64,
    /// Actions drawn per problem.
    pub n_actions: usize,
    pub inapplicable_frac: f64,
}

impl Default for EvalSetConfig {
    fn default() -> Self {
        EvalSetConfig {
            seed: 0,
            n_actions: 200,
            inapplicable_frac: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalEntry {
    pub problem: usize,
    pub state: State,
    pub action: GroundAction,
    /// Applicability under the ground truth, with exact comparisons.
    pub applicable: bool,
    /// Ground-truth successor when applicable.
    pub post: Option<State>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalSet {
    pub entries: Vec<EvalEntry>,
}

/// Per problem, `n_actions` random groundings along a walk from the initial
/// state, exactly `round(n_actions * inapplicable_frac)` of them inapplicable
/// at randomly chosen positions. Applicable draws advance the walk; a walk
/// that reaches a state with no applicable action restarts from the initial
/// state.
pub fn build_eval_set(truth: &DomainModel, problems: &[Problem], config: &EvalSetConfig) -> Result<EvalSet, EvalError> {
    if !(0.0..=1.0).contains(&config.inapplicable_frac) {
        return Err(EvalError::Config("inapplicable fraction must lie in [0, 1]".into()));
    }
    let sim = Simulator::strict(truth);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut entries = Vec::new();
    for (pi, problem) in problems.iter().enumerate() {
        let all: Vec<GroundAction> = truth
            .actions
            .iter()
            .flat_map(|a| groundings(a, truth, &problem.objects))
            .collect();
        let n_bad = (config.n_actions as f64 * config.inapplicable_frac).round() as usize;
        let mut slots: Vec<bool> = (0..config.n_actions).map(|i| i < n_bad).collect();
        slots.shuffle(&mut rng);

        let mut state = problem.init.clone();
        for bad in slots {
            if bad {
                // uniform over the inapplicable groundings of the current
                // state; when there are none, walk on without recording
                let mut action = None;
                for _ in 0..MAX_ATTEMPTS {
                    let mut out = Vec::new();
                    for a in &all {
                        if !sim.applicable(&state, a)? {
                            out.push(a);
                        }
                    }
                    if !out.is_empty() {
                        action = Some(out[rng.gen_range(0..out.len())].clone());
                        break;
                    }
                    let options = applicable_in(&sim, &all, &state)?;
                    if options.is_empty() {
                        break;
                    }
                    let step = &options[rng.gen_range(0..options.len())];
                    state = sim.apply_unchecked(&state, step)?;
                }
                let action = action.ok_or(EvalError::Infeasible {
                    problem: pi,
                    attempts: MAX_ATTEMPTS,
                })?;
                entries.push(EvalEntry {
                    problem: pi,
                    state: state.clone(),
                    action,
                    applicable: false,
                    post: None,
                });
            } else {
                let mut options = applicable_in(&sim, &all, &state)?;
                if options.is_empty() {
                    state = problem.init.clone();
                    options = applicable_in(&sim, &all, &state)?;
                    if options.is_empty() {
                        return Err(EvalError::DeadEnd { problem: pi });
                    }
                }
                let action = options[rng.gen_range(0..options.len())].clone();
                let post = sim.apply_unchecked(&state, &action)?;
                entries.push(EvalEntry {
                    problem: pi,
                    state: std::mem::replace(&mut state, post.clone()),
                    action,
                    applicable: true,
                    post: Some(post),
                });
            }
        }
    }
    Ok(EvalSet { entries })
}

fn applicable_in(sim: &Simulator, all: &[GroundAction], s: &State) -> Result<Vec<GroundAction>, EvalError> {
    let mut out = Vec::new();
    for a in all {
        if sim.applicable(s, a)? {
            out.push(a.clone());
        }
    }
    Ok(out)
}
