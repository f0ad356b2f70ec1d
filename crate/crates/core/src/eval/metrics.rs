//! Syntactic and semantic precision/recall and effect error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::evalset::EvalSet;
use super::sim::Simulator;
use super::EvalError;
use crate::pddl::{DomainModel, Literal};
use crate::precision::Rounding;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntacticScores {
    pub precision_pre: f64,
    pub recall_pre: f64,
    pub precision_eff: f64,
    pub recall_eff: f64,
}

impl SyntacticScores {
    /// Scores of an action the learner did not produce.
    pub const UNLEARNED: SyntacticScores = SyntacticScores {
        precision_pre: 0.0,
        recall_pre: 1.0,
        precision_eff: 1.0,
        recall_eff: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemanticScores {
    pub precision: f64,
    pub recall: f64,
    /// Entries applicable under both models.
    pub agree: usize,
    /// Entries applicable under the learned model.
    pub predicted: usize,
    /// Entries applicable under the truth.
    pub actual: usize,
}

impl SemanticScores {
    pub const UNLEARNED: SemanticScores = SemanticScores {
        precision: 1.0,
        recall: 0.0,
        agree: 0,
        predicted: 0,
        actual: 0,
    };
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn pr(learned: &BTreeSet<Literal>, truth: &BTreeSet<Literal>) -> (f64, f64) {
    let both = learned.intersection(truth).count();
    (ratio(both, learned.len()), ratio(both, truth.len()))
}

/// Precision and recall of the Boolean preconditions and effects of every
/// ground-truth action. Numeric conditions are not scored here.
pub fn syntactic_metrics(learned: &DomainModel, truth: &DomainModel) -> BTreeMap<String, SyntacticScores> {
    truth
        .actions
        .iter()
        .map(|t| {
            let scores = match learned.action(&t.name) {
                None => SyntacticScores::UNLEARNED,
                Some(l) => {
                    let (precision_pre, recall_pre) = pr(&l.bool_pre, &t.bool_pre);
                    let (precision_eff, recall_eff) = pr(&l.bool_eff, &t.bool_eff);
                    SyntacticScores {
                        precision_pre,
                        recall_pre,
                        precision_eff,
                        recall_eff,
                    }
                }
            };
            (t.name.clone(), scores)
        })
        .collect()
}

/// Applicability agreement over the evaluation set, counted per action.
pub fn semantic_metrics(
    learned: &Simulator,
    truth: &DomainModel,
    set: &EvalSet,
) -> Result<BTreeMap<String, SemanticScores>, EvalError> {
    let mut counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for e in &set.entries {
        let c = counts.entry(e.action.name.as_str()).or_default();
        let predicted = learned.knows(&e.action.name) && learned.applicable(&e.state, &e.action)?;
        c.0 += usize::from(predicted && e.applicable);
        c.1 += usize::from(predicted);
        c.2 += usize::from(e.applicable);
    }
    Ok(truth
        .actions
        .iter()
        .map(|a| {
            let s = if !learned.knows(&a.name) {
                SemanticScores::UNLEARNED
            } else {
                let (agree, predicted, actual) = counts.get(a.name.as_str()).copied().unwrap_or_default();
                SemanticScores {
                    precision: ratio(agree, predicted),
                    recall: ratio(agree, actual),
                    agree,
                    predicted,
                    actual,
                }
            };
            (a.name.clone(), s)
        })
        .collect())
}

/// Mean over entries applicable under both models of the per-state mean
/// squared difference between the two successors, over the functions of the
/// true successor. Zero when no entry qualifies.
pub fn effects_mse(learned: &Simulator, truth: &DomainModel, set: &EvalSet) -> Result<BTreeMap<String, f64>, EvalError> {
    let mut acc: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for e in &set.entries {
        let Some(true_post) = e.post.as_ref().filter(|_| e.applicable) else {
            continue;
        };
        if !learned.knows(&e.action.name) || !learned.applicable(&e.state, &e.action)? {
            continue;
        }
        let post = learned.apply_unchecked(&e.state, &e.action)?;
        let n = true_post.values.len();
        let se: f64 = true_post
            .values
            .iter()
            .map(|(f, v)| {
                let d = post.values.get(f).map_or(f64::NAN, |p| p - v);
                d * d
            })
            .sum();
        let c = acc.entry(e.action.name.as_str()).or_default();
        c.0 += if n == 0 { 0.0 } else { se / n as f64 };
        c.1 += 1;
    }
    Ok(truth
        .actions
        .iter()
        .map(|a| {
            let v = match acc.get(a.name.as_str()) {
                Some(&(sum, n)) if n > 0 => sum / n as f64,
                _ => 0.0,
            };
            (a.name.clone(), v)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionMetrics {
    pub learned: bool,
    pub syntactic: SyntacticScores,
    pub semantic: SemanticScores,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub actions: BTreeMap<String, ActionMetrics>,
}

const METRIC_NAMES: [&str; 7] = [
    "p_syn_pre",
    "r_syn_pre",
    "p_syn_eff",
    "r_syn_eff",
    "p_sem_pre",
    "r_sem_pre",
    "mse",
];

impl ActionMetrics {
    fn values(&self) -> [f64; 7] {
        [
            self.syntactic.precision_pre,
            self.syntactic.recall_pre,
            self.syntactic.precision_eff,
            self.syntactic.recall_eff,
            self.semantic.precision,
            self.semantic.recall,
            self.mse,
        ]
    }
}

impl MetricsReport {
    /// Mean of each metric over all actions, in CSV metric order.
    pub fn means(&self) -> Vec<(&'static str, f64)> {
        let n = self.actions.len().max(1) as f64;
        METRIC_NAMES
            .iter()
            .enumerate()
            .map(|(i, name)| (*name, self.actions.values().map(|a| a.values()[i]).sum::<f64>() / n))
            .collect()
    }

    /// `action,metric,value` rows, then the means under action `*`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("action,metric,value\n");
        for (name, m) in &self.actions {
            for (metric, v) in METRIC_NAMES.iter().zip(m.values()) {
                let _ = writeln!(out, "{name},{metric},{v}");
            }
        }
        for (metric, v) in self.means() {
            let _ = writeln!(out, "*,{metric},{v}");
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{:<24} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>10}\n",
            "action", "Psyn", "Rsyn", "PsynE", "RsynE", "Psem", "Rsem", "MSE"
        );
        let mut row = |name: &str, v: [f64; 7]| {
            let _ = writeln!(
                out,
                "{:<24} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>10.4}",
                name, v[0], v[1], v[2], v[3], v[4], v[5], v[6]
            );
        };
        for (name, m) in &self.actions {
            let label = if m.learned { name.clone() } else { format!("{name} (unlearned)") };
            row(&label, m.values());
        }
        let means = self.means();
        row("mean", std::array::from_fn(|i| means[i].1));
        out
    }
}

/// All metrics of `learned` against `truth` on `set`.
pub fn evaluate(
    learned: &DomainModel,
    truth: &DomainModel,
    set: &EvalSet,
    tolerance: f64,
    rounding: Rounding,
) -> Result<MetricsReport, EvalError> {
    let sim = Simulator::new(learned).with_tolerance(tolerance).with_rounding(rounding);
    let syn = syntactic_metrics(learned, truth);
    let sem = semantic_metrics(&sim, truth, set)?;
    let mse = effects_mse(&sim, truth, set)?;
    Ok(MetricsReport {
        actions: truth
            .actions
            .iter()
            .map(|a| {
                let n = &a.name;
                (
                    n.clone(),
                    ActionMetrics {
                        learned: learned.action(n).is_some(),
                        syntactic: syn[n],
                        semantic: sem[n],
                        mse: mse[n],
                    },
                )
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{build_eval_set, EvalSetConfig};
    use crate::pddl::{parse_domain, parse_problem, Atom};

    const TRUTH: &str = "(define (domain t) (:types obj) (:predicates (p ?o - obj) (q ?o - obj))
        (:functions (v ?o - obj))
        (:action a :parameters (?o - obj) :precondition (and (p ?o) (<= (v ?o) 5))
          :effect (and (q ?o) (assign (v ?o) 7)))
        (:action b :parameters (?o - obj) :precondition (and (q ?o)) :effect (and (not (q ?o)))))";

    fn truth() -> DomainModel {
        parse_domain(TRUTH).unwrap()
    }

    #[test]
    fn identical_models_score_perfectly() {
        let t = truth();
        for s in syntactic_metrics(&t, &t).values() {
            assert_eq!(*s, SyntacticScores { precision_pre: 1.0, recall_pre: 1.0, precision_eff: 1.0, recall_eff: 1.0 });
        }
    }

    #[test]
    fn unlearned_defaults() {
        let t = truth();
        let mut l = t.clone();
        l.actions.retain(|a| a.name != "b");
        let s = syntactic_metrics(&l, &t);
        assert_eq!(s["b"], SyntacticScores::UNLEARNED);
        let empty = EvalSet::default();
        let sim = Simulator::new(&l);
        assert_eq!(semantic_metrics(&sim, &t, &empty).unwrap()["b"], SemanticScores::UNLEARNED);
        assert_eq!(effects_mse(&sim, &t, &empty).unwrap()["b"], 0.0);
    }

    #[test]
    fn extra_precondition_halves_precision() {
        let t = truth();
        let mut l = t.clone();
        l.actions[0].bool_pre.insert(Literal::pos(Atom::new("q", ["?o"])));
        let s = syntactic_metrics(&l, &t)["a"];
        // truth pre of a has one literal, learned has two
        assert_eq!((s.precision_pre, s.recall_pre), (0.5, 1.0));
    }

    #[test]
    fn mse_of_wrong_assignment() {
        let t = truth();
        let mut l = t.clone();
        // learned v := v + 7 instead of v := 7; at v = 5 the error is 5
        l.actions[0].num_eff[0].expr = crate::pddl::NumericExpr::add(
            crate::pddl::NumericExpr::func(Atom::new("v", ["?o"])),
            crate::pddl::NumericExpr::Const(7.0),
        );
        let p = parse_problem("(define (problem p) (:domain t) (:objects o - obj) (:init (p o) (= (v o) 5)) (:goal (and)))", &t).unwrap();
        let mut post = p.init.clone();
        post.atoms.insert(Atom::new("q", ["o"]));
        post.values.insert(Atom::new("v", ["o"]), 7.0);
        let set = EvalSet {
            entries: vec![crate::eval::EvalEntry {
                problem: 0,
                state: p.init.clone(),
                action: crate::pddl::GroundAction::new("a", ["o"]),
                applicable: true,
                post: Some(post),
            }],
        };
        let mse = effects_mse(&Simulator::new(&l), &t, &set).unwrap();
        // one function in the state, squared difference 25
        assert_eq!(mse["a"], 25.0);
    }

    #[test]
    fn eval_set_counts_and_determinism() {
        let t = truth();
        let p = parse_problem(
            "(define (problem p) (:domain t) (:objects o1 o2 - obj) (:init (p o1) (p o2) (= (v o1) 0) (= (v o2) 9)) (:goal (and)))",
            &t,
        )
        .unwrap();
        let cfg = EvalSetConfig { seed: 3, n_actions: 4, inapplicable_frac: 0.25 };
        let set = build_eval_set(&t, std::slice::from_ref(&p), &cfg).unwrap();
        assert_eq!(set.entries.len(), 4);
        assert_eq!(set.entries.iter().filter(|e| !e.applicable).count(), 1);
        assert_eq!(set, build_eval_set(&t, &[p], &cfg).unwrap());

        let r = evaluate(&t, &t, &set, 0.0, Rounding::Off).unwrap();
        for m in r.actions.values() {
            assert_eq!(m.semantic.precision, 1.0);
            assert_eq!(m.semantic.recall, 1.0);
            assert_eq!(m.mse, 0.0);
        }
        assert!(r.to_csv().starts_with("action,metric,value\na,p_syn_pre,1\n"));
    }
}
