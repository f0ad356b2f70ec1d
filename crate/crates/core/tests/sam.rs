use nsam_core::bench::*;
use nsam_core::pddl::{bound_literals, Literal, ParameterBinding, Trajectory};
use nsam_core::sam::*;
use proptest::prelude::*;

fn replay(truth: &nsam_core::pddl::DomainModel, trajs: &[Trajectory]) -> BoolModelDraft {
    let mut draft = init_draft(truth);
    for t in trajs {
        for tr in t.transitions() {
            apply_inductive_rules(&mut draft, truth, tr, |o| t.object_type(o)).unwrap();
        }
    }
    draft
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn draft_brackets_the_truth(seed in 0u64..1000, d in prop::sample::select(vec!["farmland", "counters", "sailing"])) {
        let b = generate(&DomainRegistry::with_defaults(), &GeneratorConfig { domain: d.into(), problems: 5, length: 15, seed }).unwrap();
        let draft = replay(&b.truth, &b.trajectories);
        for a in &b.truth.actions {
            let dr = draft.action(&a.name).unwrap();
            prop_assert!(dr.candidate_pre.is_superset(&a.bool_pre));
            if dr.observations > 0 {
                prop_assert_eq!(&dr.known_eff, &a.bool_eff);
            }
            // every candidate precondition held in every observed pre-state
            for t in &b.trajectories {
                for tr in t.transitions().iter().filter(|tr| tr.action.name == a.name) {
                    let bind = ParameterBinding::ground(a, &tr.action, &b.truth, |o| t.object_type(o)).unwrap();
                    for l in &dr.candidate_pre {
                        prop_assert!(bind.ground_literal(l).holds(&tr.pre));
                    }
                }
            }
        }
    }
}

#[test]
fn unobserved_action_keeps_every_literal() {
    let truth = ground_truth("sailing").unwrap();
    let draft = replay(&truth, &[]);
    let a = truth.action("save_person").unwrap();
    let all: std::collections::BTreeSet<Literal> = bound_literals(a, &truth).into_iter().collect();
    assert_eq!(draft.action("save_person").unwrap().candidate_pre, all);
}
