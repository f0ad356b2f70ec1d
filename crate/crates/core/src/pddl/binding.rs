//! Parameter-bound literals and functions, grounding and lifting.

use std::collections::BTreeMap;

use super::model::*;
use super::PddlError;

/// Every injective assignment of `sig`'s positions to type-compatible action
/// parameters, in lexicographic order of parameter indices.
fn injections(sig: &Signature, action: &ActionSchema, domain: &DomainModel) -> Vec<Vec<String>> {
    fn rec(
        pos: usize,
        sig: &Signature,
        action: &ActionSchema,
        domain: &DomainModel,
        used: &mut Vec<bool>,
        cur: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        if pos == sig.params.len() {
            out.push(cur.clone());
            return;
        }
        for (i, p) in action.params.iter().enumerate() {
            if used[i] || !domain.is_subtype(&p.ty, &sig.params[pos].ty) {
                continue;
            }
            used[i] = true;
            cur.push(p.name.clone());
            rec(pos + 1, sig, action, domain, used, cur, out);
            cur.pop();
            used[i] = false;
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; action.params.len()];
    rec(0, sig, action, domain, &mut used, &mut Vec::new(), &mut out);
    out
}

/// All pb-literals of `action`: both polarities of every type-compatible
/// injective binding of every predicate.
pub fn bound_literals(action: &ActionSchema, domain: &DomainModel) -> Vec<Literal> {
    let mut out = Vec::new();
    for pred in &domain.predicates {
        for args in injections(pred, action, domain) {
            let atom = Atom::new(pred.name.clone(), args);
            out.push(Literal::pos(atom.clone()));
            out.push(Literal::neg(atom));
        }
    }
    out
}

/// All pb-functions of `action`, in function declaration order.
pub fn bound_functions(action: &ActionSchema, domain: &DomainModel) -> Vec<FunctionTerm> {
    domain
        .functions
        .iter()
        .flat_map(|f| {
            injections(f, action, domain)
                .into_iter()
                .map(move |args| Atom::new(f.name.clone(), args))
        })
        .collect()
}

/// Injective mapping between an action's parameters and the objects of one
/// grounded occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterBinding {
    to_object: BTreeMap<String, String>,
    to_param: BTreeMap<String, String>,
}

impl ParameterBinding {
    /// Bind `action` to `schema`. Object types are checked when
    /// `object_type` knows the object; non-injective groundings are rejected.
    pub fn ground<'a>(
        schema: &ActionSchema,
        action: &GroundAction,
        domain: &DomainModel,
        object_type: impl Fn(&str) -> Option<&'a str>,
    ) -> Result<Self, PddlError> {
        if schema.params.len() != action.args.len() {
            return Err(PddlError::Arity {
                name: action.name.clone(),
                expected: schema.params.len(),
                found: action.args.len(),
                line: 0,
            });
        }
        let mut to_object = BTreeMap::new();
        let mut to_param = BTreeMap::new();
        for (p, o) in schema.params.iter().zip(&action.args) {
            if let Some(ty) = object_type(o) {
                if !domain.is_subtype(ty, &p.ty) {
                    return Err(PddlError::TypeMismatch {
                        name: o.clone(),
                        expected: p.ty.clone(),
                        found: ty.to_string(),
                        line: 0,
                    });
                }
            }
            if to_param.insert(o.clone(), p.name.clone()).is_some() {
                return Err(PddlError::NonInjective {
                    action: action.to_string(),
                });
            }
            to_object.insert(p.name.clone(), o.clone());
        }
        Ok(ParameterBinding {
            to_object,
            to_param,
        })
    }

    /// Lifted view of a grounded atom; `None` when it mentions an object that
    /// is not one of the action's arguments.
    pub fn lift(&self, atom: &Atom) -> Option<Atom> {
        let args = atom
            .args
            .iter()
            .map(|o| self.to_param.get(o).cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(Atom::new(atom.name.clone(), args))
    }

    /// Grounded view of a lifted atom. Unknown names (constants) pass through.
    pub fn ground_atom(&self, atom: &Atom) -> Atom {
        Atom {
            name: atom.name.clone(),
            args: atom.args.iter().map(|a| self.object(a)).collect(),
        }
    }

    pub fn ground_literal(&self, lit: &Literal) -> Literal {
        Literal {
            atom: self.ground_atom(&lit.atom),
            positive: lit.positive,
        }
    }

    pub fn ground_expr(&self, e: &NumericExpr) -> NumericExpr {
        e.map_args(&|a| self.object(a))
    }

    fn object(&self, name: &str) -> String {
        self.to_object
            .get(name)
            .cloned()
            .unwrap_or_else(|| name.to_string())
    }
}

/// Every injective, type-compatible grounding of `schema` over `objects`.
pub fn groundings(
    schema: &ActionSchema,
    domain: &DomainModel,
    objects: &[TypedName],
) -> Vec<GroundAction> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; objects.len()];
    fn rec(
        i: usize,
        schema: &ActionSchema,
        domain: &DomainModel,
        objects: &[TypedName],
        used: &mut Vec<bool>,
        cur: &mut Vec<String>,
        out: &mut Vec<GroundAction>,
    ) {
        if i == schema.params.len() {
            out.push(GroundAction::new(schema.name.clone(), cur.clone()));
            return;
        }
        for (j, o) in objects.iter().enumerate() {
            if used[j] || !domain.is_subtype(&o.ty, &schema.params[i].ty) {
                continue;
            }
            used[j] = true;
            cur.push(o.name.clone());
            rec(i + 1, schema, domain, objects, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
    rec(0, schema, domain, objects, &mut used, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse_domain;

    fn farmland() -> DomainModel {
        parse_domain(
            "(define (domain farmland) (:types farm)
              (:predicates (adj ?f1 ?f2 - farm)) (:functions (x ?b - farm) (cost))
              (:action move-slow :parameters (?f1 - farm ?f2 - farm)
                :precondition (and (>= (x ?f1) 1) (adj ?f1 ?f2))
                :effect (and (decrease (x ?f1) 1) (increase (x ?f2) 1)))
              (:action noop :parameters () :precondition (and) :effect (and)))",
        )
        .unwrap()
    }

    #[test]
    fn move_slow_bound_sets() {
        let d = farmland();
        let a = d.action("move-slow").unwrap();
        let lits = bound_literals(a, &d);
        let adj = |x: &str, y: &str| Atom::new("adj", [x, y]);
        assert_eq!(
            lits,
            vec![
                Literal::pos(adj("?f1", "?f2")),
                Literal::neg(adj("?f1", "?f2")),
                Literal::pos(adj("?f2", "?f1")),
                Literal::neg(adj("?f2", "?f1")),
            ]
        );
        let funcs = bound_functions(a, &d);
        assert_eq!(
            funcs,
            vec![
                Atom::new("x", ["?f1"]),
                Atom::new("x", ["?f2"]),
                Atom::new("cost", Vec::<String>::new())
            ]
        );
    }

    #[test]
    fn parameterless_action_has_no_bound_literals() {
        let d = farmland();
        assert!(bound_literals(d.action("noop").unwrap(), &d).is_empty());
    }

    #[test]
    fn ground_and_lift() {
        let d = farmland();
        let a = d.action("move-slow").unwrap();
        let b = ParameterBinding::ground(a, &GroundAction::new("move-slow", ["f1", "f2"]), &d, |_| Some("farm")).unwrap();
        assert_eq!(b.lift(&Atom::new("adj", ["f1", "f2"])), Some(Atom::new("adj", ["?f1", "?f2"])));
        assert_eq!(b.lift(&Atom::new("adj", ["f1", "f3"])), None);
        let lifted = Atom::new("adj", ["?f2", "?f1"]);
        assert_eq!(b.lift(&b.ground_atom(&lifted)), Some(lifted));
    }

    #[test]
    fn repeated_object_is_rejected() {
        let d = farmland();
        let a = d.action("move-slow").unwrap();
        let err = ParameterBinding::ground(a, &GroundAction::new("move-slow", ["f1", "f1"]), &d, |_| None);
        assert!(matches!(err, Err(PddlError::NonInjective { .. })));
    }

    #[test]
    fn groundings_are_injective() {
        let d = farmland();
        let objs = vec![TypedName::new("a", "farm"), TypedName::new("b", "farm"), TypedName::new("c", "farm")];
        let g = groundings(d.action("move-slow").unwrap(), &d, &objs);
        assert_eq!(g.len(), 6);
        assert!(g.iter().all(|ga| ga.args[0] != ga.args[1]));
    }
}
