//! Safe numeric action-model learners.

mod model;
mod monomial;
mod nsam;
mod nsam_star;
mod observe;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::pddl::{DomainModel, PddlError, Trajectory};
use crate::precision::{DEFAULT_DIGITS, MAX_DIGITS};
use crate::sam::SamError;

pub use model::{
    serialize_learned, LearnedAction, LearnedModel, LinearEffect, NumericModel, Preconditions,
};
pub use monomial::{expand_monomials, monomials, Monomial};
pub use nsam::NSam;
pub use nsam_star::{build_subspace, create_preconditions, learn_effects_star, NSamStar, SubspaceModel};
pub use observe::{build_observation_dbs, ActionObservations, ObservationDb};

/// Tolerance on training residuals for an effect to count as exact,
/// relative to `max(1, max |target|)`.
pub const EFFECT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    /// Maximal monomial degree, at least 1.
    pub degree: u32,
    /// Per action, the monomial labels to keep. Actions not listed keep all.
    pub relevant_functions: Option<BTreeMap<String, Vec<String>>>,
    /// Decimal digits printed for learned constants, 1..=15.
    pub digits: u32,
    pub rank_tol: f64,
    pub effect_tol: f64,
    /// Worker threads for per-action learning.
    pub jobs: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            degree: 1,
            relevant_functions: None,
            digits: DEFAULT_DIGITS,
            rank_tol: crate::numerics::RANK_TOL,
            effect_tol: EFFECT_TOL,
            jobs: 1,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.degree < 1 {
            return Err(LearnError::Config("polynomial degree must be at least 1".into()));
        }
        if !(1..=MAX_DIGITS).contains(&self.digits) {
            return Err(LearnError::Config(format!(
                "precision must be between 1 and {MAX_DIGITS} digits, got {}",
                self.digits
            )));
        }
        if self.jobs == 0 {
            return Err(LearnError::Config("jobs must be at least 1".into()));
        }
        for (name, tol) in [("rank", self.rank_tol), ("effect", self.effect_tol)] {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(LearnError::Config(format!("{name} tolerance must be positive")));
            }
        }
        Ok(())
    }
}

/// Parse a relevant-functions file: one `action: label, label, ...` line per
/// action. Blank lines and `;` comments are skipped.
pub fn parse_relevant_functions(text: &str) -> Result<BTreeMap<String, Vec<String>>, LearnError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (action, labels) = line.split_once(':').ok_or_else(|| {
            LearnError::Config(format!("relevant functions line {}: expected 'action: labels'", n + 1))
        })?;
        let labels: Vec<String> = labels
            .split(',')
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        if out.insert(action.trim().to_lowercase(), labels).is_some() {
            return Err(LearnError::Config(format!(
                "relevant functions line {}: action '{}' listed twice",
                n + 1,
                action.trim()
            )));
        }
    }
    Ok(out)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Sam(#[from] SamError),
    #[error("action {action}: {source}")]
    Numerics {
        action: String,
        source: NumericsError,
    },
    #[error("action {action}: relevant function '{label}' is not a monomial of its functions")]
    UnknownRelevantLabel { action: String, label: String },
    #[error("action {action}: function {function} has no value in an observed state")]
    MissingValue { action: String, function: String },
    #[error("action {action}: effect on {function} is not an exact affine function of the pre-state (max residual {residual:e})")]
    InconsistentEffects {
        action: String,
        function: String,
        residual: f64,
    },
    #[error("unknown learner '{0}'")]
    UnknownLearner(String),
}

/// A learning algorithm selectable by name.
pub trait Learner: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn learn(
        &self,
        domain: &DomainModel,
        trajectories: &[Trajectory],
        config: &LearnConfig,
    ) -> Result<LearnedModel, LearnError>;
}

pub struct LearnerRegistry {
    learners: Vec<Box<dyn Learner>>,
}

impl LearnerRegistry {
    pub fn empty() -> Self {
        LearnerRegistry {
            learners: Vec::new(),
        }
    }

    /// Registers `nsam` and `nsam-star`.
    pub fn with_defaults() -> Self {
        let mut r = LearnerRegistry::empty();
        r.register(Box::new(NSam));
        r.register(Box::new(NSamStar));
        r
    }

    /// Later registrations replace earlier ones of the same name.
    pub fn register(&mut self, learner: Box<dyn Learner>) {
        self.learners.retain(|l| l.name() != learner.name());
        self.learners.push(learner);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Learner, LearnError> {
        self.learners
            .iter()
            .find(|l| l.name() == name)
            .map(|l| l.as_ref())
            .ok_or_else(|| LearnError::UnknownLearner(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.learners.iter().map(|l| l.name()).collect()
    }
}

impl Default for LearnerRegistry {
    fn default() -> Self {
        LearnerRegistry::with_defaults()
    }
}

/// Map `f` over `items` on up to `jobs` scoped threads, keeping order.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("learner worker panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_bounds() {
        assert!(LearnConfig::default().validate().is_ok());
        assert!(LearnConfig { degree: 0, ..Default::default() }.validate().is_err());
        assert!(LearnConfig { digits: 0, ..Default::default() }.validate().is_err());
        assert!(LearnConfig { digits: 16, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn relevant_functions_file() {
        let rf = parse_relevant_functions("; comment\nmove-slow: (x ?f1), (x ?f1)*(cost)\n\nnoop:\n").unwrap();
        assert_eq!(rf["move-slow"], vec!["(x ?f1)", "(x ?f1)*(cost)"]);
        assert!(rf["noop"].is_empty());
        assert!(parse_relevant_functions("bad line").is_err());
    }

    #[test]
    fn registry_lookup() {
        let r = LearnerRegistry::with_defaults();
        assert_eq!(r.names(), vec!["nsam", "nsam-star"]);
        assert!(r.get("nsam-star").is_ok());
        assert!(matches!(r.get("plan-miner"), Err(LearnError::UnknownLearner(_))));
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<u32> = (0..17).collect();
        assert_eq!(par_map(&v, 4, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
