//! Ground-truth benchmark domains and random trajectory generation.

mod domains;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eval::{EvalError, Simulator};
use crate::pddl::{groundings, parse_domain, DomainModel, GroundAction, Problem, Trajectory};

pub use domains::{Counters, Farmland, Sailing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("unknown benchmark domain '{0}'")]
    UnknownDomain(String),
    #[error("problem {problem}: no applicable action after {step} steps")]
    DeadEnd { problem: String, step: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A benchmark domain with a known ground truth.
pub trait BenchDomain: Send + Sync {
    fn name(&self) -> &'static str;

    /// Ground-truth domain text, including its comment header.
    fn pddl(&self) -> &'static str;

    fn ground_truth(&self) -> DomainModel {
        parse_domain(self.pddl()).expect("bundled domains parse")
    }

    /// A random instance named after `index`.
    fn random_problem(&self, index: usize, rng: &mut ChaCha8Rng) -> Problem;
}

pub struct DomainRegistry {
    domains: Vec<Box<dyn BenchDomain>>,
}

impl DomainRegistry {
    pub fn empty() -> Self {
        DomainRegistry {
            domains: Vec::new(),
        }
    }

    /// Registers farmland, counters and sailing.
    pub fn with_defaults() -> Self {
        let mut r = DomainRegistry::empty();
        r.register(Box::new(Farmland));
        r.register(Box::new(Counters));
        r.register(Box::new(Sailing));
        r
    }

    pub fn register(&mut self, domain: Box<dyn BenchDomain>) {
        self.domains.retain(|d| d.name() != domain.name());
        self.domains.push(domain);
    }

    pub fn get(&self, name: &str) -> Result<&dyn BenchDomain, BenchError> {
        self.domains
            .iter()
            .find(|d| d.name() == name)
            .map(|d| d.as_ref())
            .ok_or_else(|| BenchError::UnknownDomain(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.domains.iter().map(|d| d.name()).collect()
    }
}

impl Default for DomainRegistry {
    fn default() -> Self {
        DomainRegistry::with_defaults()
    }
}

/// Ground truth of a registered domain.
pub fn ground_truth(name: &str) -> Result<DomainModel, BenchError> {
    Ok(DomainRegistry::with_defaults().get(name)?.ground_truth())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub domain: String,
    pub problems: usize,
    /// Transitions per trajectory.
    pub length: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            domain: "farmland".into(),
            problems: 100,
            length: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub truth: DomainModel,
    pub problems: Vec<Problem>,
    pub trajectories: Vec<Trajectory>,
}

/// Per-problem generator: instance `i` and its walk use their own streams,
/// so they do not depend on how many problems are generated.
fn stream(seed: u64, s: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s);
    rng
}

/// `config.problems` random instances of `domain`.
pub fn random_problems(domain: &dyn BenchDomain, count: usize, seed: u64) -> Vec<Problem> {
    (0..count)
        .map(|i| domain.random_problem(i, &mut stream(seed, 2 * i as u64)))
        .collect()
}

/// Random instances with one random applicable walk each.
pub fn generate(registry: &DomainRegistry, config: &GeneratorConfig) -> Result<Benchmark, BenchError> {
    let domain = registry.get(&config.domain)?;
    let truth = domain.ground_truth();
    let problems = random_problems(domain, config.problems, config.seed);
    let trajectories = generate_trajectories(&truth, &problems, config.length, config.seed)?;
    Ok(Benchmark {
        truth,
        problems,
        trajectories,
    })
}

/// One walk of `length` uniformly chosen applicable actions per problem.
pub fn generate_trajectories(
    truth: &DomainModel,
    problems: &[Problem],
    length: usize,
    seed: u64,
) -> Result<Vec<Trajectory>, BenchError> {
    problems
        .iter()
        .enumerate()
        .map(|(i, p)| random_walk(truth, p, length, &mut stream(seed, 2 * i as u64 + 1)))
        .collect()
}

/// A walk that fails with a dead-end error when no action is applicable.
pub fn random_walk(truth: &DomainModel, problem: &Problem, length: usize, rng: &mut impl Rng) -> Result<Trajectory, BenchError> {
    let sim = Simulator::strict(truth);
    let all: Vec<GroundAction> = truth
        .actions
        .iter()
        .flat_map(|a| groundings(a, truth, &problem.objects))
        .collect();
    let mut traj = Trajectory::new(problem.objects.clone(), problem.init.clone());
    for step in 0..length {
        let state = traj.last_state();
        let mut options = Vec::new();
        for a in &all {
            if sim.applicable(state, a)? {
                options.push(a);
            }
        }
        if options.is_empty() {
            return Err(BenchError::DeadEnd {
                problem: problem.name.clone(),
                step,
            });
        }
        let a = options[rng.gen_range(0..options.len())].clone();
        let post = sim.apply_unchecked(state, &a)?;
        traj.push(a, post);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_three_domains() {
        let r = DomainRegistry::with_defaults();
        assert_eq!(r.names(), vec!["farmland", "counters", "sailing"]);
        assert!(matches!(r.get("depot"), Err(BenchError::UnknownDomain(_))));
    }

    #[test]
    fn domain_shapes() {
        let f = ground_truth("farmland").unwrap();
        assert_eq!((f.actions.len(), f.predicates.len(), f.functions.len()), (2, 1, 2));
        let c = ground_truth("counters").unwrap();
        assert_eq!((c.actions.len(), c.predicates.len(), c.functions.len()), (4, 0, 3));
        let s = ground_truth("sailing").unwrap();
        assert_eq!((s.actions.len(), s.predicates.len(), s.functions.len()), (8, 1, 3));
    }

    #[test]
    fn zero_length_walk() {
        let cfg = GeneratorConfig { problems: 2, length: 0, ..Default::default() };
        let b = generate(&DomainRegistry::with_defaults(), &cfg).unwrap();
        assert!(b.trajectories.iter().all(|t| t.is_empty()));
    }

    #[test]
    fn generation_is_deterministic_and_prefix_stable() {
        let r = DomainRegistry::with_defaults();
        for name in r.names() {
            let cfg = GeneratorConfig { domain: name.into(), problems: 4, length: 15, seed: 9 };
            let a = generate(&r, &cfg).unwrap();
            let b = generate(&r, &GeneratorConfig { problems: 2, ..cfg.clone() }).unwrap();
            assert_eq!(a, generate(&r, &cfg).unwrap());
            assert_eq!(a.trajectories[..2], b.trajectories[..]);
        }
    }
}
