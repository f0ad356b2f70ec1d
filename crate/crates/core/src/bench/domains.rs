use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::BenchDomain;
use crate::pddl::{
    Atom, Comparison, Condition, Literal, NumericCondition, NumericExpr, Problem, State, TypedName,
};

fn objects(prefix: &str, ty: &str, n: usize) -> Vec<TypedName> {
    (1..=n).map(|i| TypedName::new(format!("{prefix}{i}"), ty)).collect()
}

fn func(name: &str, args: &[&str]) -> Atom {
    Atom::new(name, args.iter().copied())
}

fn int(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

pub struct Farmland;

impl BenchDomain for Farmland {
    fn name(&self) -> &'static str {
        "farmland"
    }

    fn pddl(&self) -> &'static str {
        include_str!("domains/farmland.pddl")
    }

    /// 2 to 4 farms on a two-way ring with 0 to 12 workers each.
    fn random_problem(&self, index: usize, rng: &mut ChaCha8Rng) -> Problem {
        let n = rng.gen_range(2..=4);
        let farms = objects("farm", "farm", n);
        let mut init = State::default();
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j {
                init.atoms.insert(func("adj", &[&farms[i].name, &farms[j].name]));
                init.atoms.insert(func("adj", &[&farms[j].name, &farms[i].name]));
            }
        }
        for f in &farms {
            init.values.insert(func("x", &[&f.name]), int(rng, 0, 12));
        }
        // at least one worker keeps every walk alive
        init.values.insert(func("x", &[&farms[0].name]), int(rng, 1, 12));
        init.values.insert(func("cost", &[]), 0.0);
        let goal = farms
            .iter()
            .map(|f| {
                Condition::Numeric(NumericCondition::new(
                    NumericExpr::func(func("x", &[&f.name])),
                    Comparison::Ge,
                    1.0,
                ))
            })
            .collect();
        Problem {
            name: format!("farmland-{index}"),
            domain: "farmland".into(),
            objects: farms,
            init,
            goal,
        }
    }
}

pub struct Counters;

impl BenchDomain for Counters {
    fn name(&self) -> &'static str {
        "counters"
    }

    fn pddl(&self) -> &'static str {
        include_str!("domains/counters.pddl")
    }

    /// 2 to 4 counters, max_int in [10, 40], rates in [0, 3].
    fn random_problem(&self, index: usize, rng: &mut ChaCha8Rng) -> Problem {
        let n = rng.gen_range(2..=4);
        let counters = objects("c", "counter", n);
        let max = rng.gen_range(10..=40);
        let mut init = State::default();
        init.values.insert(func("max_int", &[]), max as f64);
        for c in &counters {
            init.values.insert(func("value", &[&c.name]), int(rng, 0, max));
            init.values.insert(func("rate_value", &[&c.name]), int(rng, 0, 3));
        }
        // increasing order of values
        let goal = counters
            .windows(2)
            .map(|w| {
                Condition::Numeric(NumericCondition::new(
                    NumericExpr::sub(
                        NumericExpr::func(func("value", &[&w[0].name])),
                        NumericExpr::func(func("value", &[&w[1].name])),
                    ),
                    Comparison::Le,
                    -1.0,
                ))
            })
            .collect();
        Problem {
            name: format!("counters-{index}"),
            domain: "counters".into(),
            objects: counters,
            init,
            goal,
        }
    }
}

pub struct Sailing;

impl BenchDomain for Sailing {
    fn name(&self) -> &'static str {
        "sailing"
    }

    fn pddl(&self) -> &'static str {
        include_str!("domains/sailing.pddl")
    }

    /// 1 or 2 boats near the origin and 1 to 3 people at distance 0 to 15.
    fn random_problem(&self, index: usize, rng: &mut ChaCha8Rng) -> Problem {
        let boats = objects("b", "boat", rng.gen_range(1..=2));
        let people = objects("p", "person", rng.gen_range(1..=3));
        let mut init = State::default();
        for b in &boats {
            init.values.insert(func("x", &[&b.name]), int(rng, -10, 10));
            init.values.insert(func("y", &[&b.name]), int(rng, 0, 10));
        }
        for p in &people {
            init.values.insert(func("d", &[&p.name]), int(rng, 0, 15));
        }
        let goal = people
            .iter()
            .map(|p| Condition::Literal(Literal::pos(func("saved", &[&p.name]))))
            .collect();
        Problem {
            name: format!("sailing-{index}"),
            domain: "sailing".into(),
            objects: boats.into_iter().chain(people).collect(),
            init,
            goal,
        }
    }
}
