//! Applicability checks and successor states under a model.

use crate::pddl::{
    AssignOp, DomainModel, GroundAction, NumericExpr, ParameterBinding, State,
};
use crate::precision::Rounding;

use super::EvalError;

/// Default slack for numeric comparisons.
pub const DEFAULT_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct Simulator<'a> {
    pub model: &'a DomainModel,
    pub tolerance: f64,
    pub rounding: Rounding,
}

impl<'a> Simulator<'a> {
    pub fn new(model: &'a DomainModel) -> Self {
        Simulator {
            model,
            tolerance: DEFAULT_TOLERANCE,
            rounding: Rounding::Off,
        }
    }

    /// Zero-tolerance comparisons.
    pub fn strict(model: &'a DomainModel) -> Self {
        Simulator::new(model).with_tolerance(0.0)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_rounding(mut self, rounding: Rounding) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn knows(&self, action: &str) -> bool {
        self.model.action(action).is_some()
    }

    fn bind(&self, a: &GroundAction) -> Result<(&'a crate::pddl::ActionSchema, ParameterBinding), EvalError> {
        let schema = self
            .model
            .action(&a.name)
            .ok_or_else(|| EvalError::UnknownAction(a.name.clone()))?;
        let b = ParameterBinding::ground(schema, a, self.model, |_| None)?;
        Ok((schema, b))
    }

    /// Boolean literals hold and every numeric condition holds within the
    /// tolerance. Conditions over undefined functions do not hold.
    pub fn applicable(&self, s: &State, a: &GroundAction) -> Result<bool, EvalError> {
        let (schema, b) = self.bind(a)?;
        if !schema.bool_pre.iter().all(|l| b.ground_literal(l).holds(s)) {
            return Ok(false);
        }
        for c in &schema.num_pre {
            let lhs = b.ground_expr(&c.lhs);
            match lhs.eval(&s.values, self.rounding) {
                Ok(v) if c.rel.holds(v, c.rhs, self.tolerance) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Successor of an applicable action.
    pub fn apply(&self, s: &State, a: &GroundAction) -> Result<State, EvalError> {
        if !self.applicable(s, a)? {
            return Err(EvalError::Inapplicable {
                action: a.to_string(),
            });
        }
        self.apply_unchecked(s, a)
    }

    /// Successor without checking preconditions. Effects read the pre-state.
    pub fn apply_unchecked(&self, s: &State, a: &GroundAction) -> Result<State, EvalError> {
        let (schema, b) = self.bind(a)?;
        let mut next = s.clone();
        for l in &schema.bool_eff {
            if !l.positive {
                next.atoms.remove(&b.ground_atom(&l.atom));
            }
        }
        for l in &schema.bool_eff {
            if l.positive {
                next.atoms.insert(b.ground_atom(&l.atom));
            }
        }
        let fail = |failure| EvalError::Evaluation {
            action: a.to_string(),
            failure,
        };
        let mut updates = Vec::new();
        for e in &schema.num_eff {
            let target = b.ground_atom(&e.target);
            let rhs = b.ground_expr(&e.expr).eval(&s.values, self.rounding).map_err(fail)?;
            let v = match e.op {
                AssignOp::Assign => rhs,
                op => {
                    let cur = NumericExpr::func(target.clone()).eval(&s.values, self.rounding).map_err(fail)?;
                    let v = if op == AssignOp::Increase { cur + rhs } else { cur - rhs };
                    self.rounding.apply(v)
                }
            };
            updates.push((target, v));
        }
        for (t, v) in updates {
            next.values.insert(t, v);
        }
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, Atom};

    fn farmland() -> DomainModel {
        parse_domain(
            "(define (domain farmland) (:types farm)
              (:predicates (adj ?f1 ?f2 - farm)) (:functions (x ?b - farm) (cost))
              (:action move-slow :parameters (?f1 - farm ?f2 - farm)
                :precondition (and (>= (x ?f1) 1) (adj ?f1 ?f2))
                :effect (and (decrease (x ?f1) 1) (increase (x ?f2) 1)))
              (:action rest :parameters () :precondition (and) :effect (and)))",
        )
        .unwrap()
    }

    fn state(x1: f64, x2: f64) -> State {
        let mut s = State::default();
        s.atoms.insert(Atom::new("adj", ["f1", "f2"]));
        s.values.insert(Atom::new("x", ["f1"]), x1);
        s.values.insert(Atom::new("x", ["f2"]), x2);
        s.values.insert(Atom::new("cost", Vec::<String>::new()), 0.0);
        s
    }

    #[test]
    fn move_slow_applicability_and_effects() {
        let d = farmland();
        let sim = Simulator::strict(&d);
        let a = GroundAction::new("move-slow", ["f1", "f2"]);
        assert!(!sim.applicable(&state(0.0, 0.0), &a).unwrap());
        let next = sim.apply(&state(2.0, 3.0), &a).unwrap();
        assert_eq!(next.value(&Atom::new("x", ["f1"])), Some(1.0));
        assert_eq!(next.value(&Atom::new("x", ["f2"])), Some(4.0));
        assert!(sim.apply(&state(0.0, 0.0), &a).is_err());
        // the reverse direction lacks (adj f2 f1)
        assert!(!sim.applicable(&state(5.0, 5.0), &GroundAction::new("move-slow", ["f2", "f1"])).unwrap());
    }

    #[test]
    fn tolerance_admits_near_misses() {
        let d = farmland();
        let a = GroundAction::new("move-slow", ["f1", "f2"]);
        assert!(Simulator::new(&d).applicable(&state(0.95, 0.0), &a).unwrap());
        assert!(!Simulator::strict(&d).applicable(&state(0.95, 0.0), &a).unwrap());
    }

    #[test]
    fn empty_preconditions_always_hold() {
        let d = farmland();
        assert!(Simulator::strict(&d).applicable(&State::default(), &GroundAction::new("rest", Vec::<String>::new())).unwrap());
    }
}
