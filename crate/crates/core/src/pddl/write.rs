//! PDDL and trajectory writers.
//!
//! Domain files print every scalar with a fixed number of decimal digits.
//! Problems and trajectories use the shortest exact decimal form so that
//! replaying a written trajectory reproduces the recorded values bit for bit.

use std::fmt::Write as _;

use super::model::*;
use crate::precision::{format_exact, format_fixed};

#[derive(Clone, Copy)]
enum Numbers {
    Fixed(u32),
    Exact,
}

impl Numbers {
    fn fmt(self, x: f64) -> String {
        match self {
            Numbers::Fixed(k) => format_fixed(x, k),
            Numbers::Exact => format_exact(x),
        }
    }
}

fn expr_text(e: &NumericExpr, num: Numbers) -> String {
    match e {
        NumericExpr::Const(c) => num.fmt(*c),
        NumericExpr::Func(t) => t.to_string(),
        NumericExpr::Binary(op, a, b) => {
            format!("({} {} {})", op.symbol(), expr_text(a, num), expr_text(b, num))
        }
    }
}

fn condition_text(c: &NumericCondition, num: Numbers) -> String {
    format!(
        "({} {} {})",
        c.rel.symbol(),
        expr_text(&c.lhs, num),
        num.fmt(c.rhs)
    )
}

/// Render a single expression with `digits` fixed decimals.
pub fn format_expr(e: &NumericExpr, digits: u32) -> String {
    expr_text(e, Numbers::Fixed(digits))
}

pub fn format_condition(c: &NumericCondition, digits: u32) -> String {
    condition_text(c, Numbers::Fixed(digits))
}

fn typed_list(items: &[TypedName]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < items.len() {
        let ty = &items[i].ty;
        let mut j = i;
        while j < items.len() && items[j].ty == *ty {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&items[j].name);
            j += 1;
        }
        let _ = write!(out, " - {ty}");
        i = j;
    }
    out
}

fn signature(sig: &Signature) -> String {
    if sig.params.is_empty() {
        format!("({})", sig.name)
    } else {
        format!("({} {})", sig.name, typed_list(&sig.params))
    }
}

fn conjunction(parts: &[String], indent: &str) -> String {
    match parts.len() {
        0 => "(and)".to_string(),
        _ => {
            let sep = format!("\n{indent}     ");
            format!("(and {})", parts.join(&sep))
        }
    }
}

fn action_text(a: &ActionSchema, digits: u32) -> String {
    let num = Numbers::Fixed(digits);
    let pre: Vec<String> = a
        .bool_pre
        .iter()
        .map(Literal::to_string)
        .chain(a.num_pre.iter().map(|c| condition_text(c, num)))
        .collect();
    let eff: Vec<String> = a
        .bool_eff
        .iter()
        .map(Literal::to_string)
        .chain(a.num_eff.iter().map(|e| {
            format!("({} {} {})", e.op.keyword(), e.target, expr_text(&e.expr, num))
        }))
        .collect();
    format!(
        "  (:action {}\n    :parameters ({})\n    :precondition {}\n    :effect {})\n",
        a.name,
        typed_list(&a.params),
        conjunction(&pre, "    "),
        conjunction(&eff, "    ")
    )
}

/// Serialize a domain, printing every scalar with exactly `digits` decimals.
pub fn serialize_domain(model: &DomainModel, digits: u32) -> String {
    serialize_domain_with_header(model, digits, &[])
}

/// Like [`serialize_domain`], with leading `;` comment lines.
pub fn serialize_domain_with_header(model: &DomainModel, digits: u32, header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "; {line}");
    }
    let _ = writeln!(out, "(define (domain {})", model.name);
    if !model.requirements.is_empty() {
        let _ = writeln!(out, "  (:requirements {})", model.requirements.join(" "));
    }
    if !model.types.is_empty() {
        let types: Vec<TypedName> = model
            .types
            .iter()
            .map(|(t, p)| TypedName::new(t.clone(), p.clone()))
            .collect();
        let _ = writeln!(out, "  (:types {})", typed_list(&types));
    }
    if !model.constants.is_empty() {
        let _ = writeln!(out, "  (:constants {})", typed_list(&model.constants));
    }
    let preds: String = model.predicates.iter().map(|p| format!(" {}", signature(p))).collect();
    let _ = writeln!(out, "  (:predicates{preds})");
    let funcs: String = model.functions.iter().map(|f| format!(" {}", signature(f))).collect();
    let _ = writeln!(out, "  (:functions{funcs})");
    for a in &model.actions {
        out.push('\n');
        out.push_str(&action_text(a, digits));
    }
    out.push_str(")\n");
    out
}

fn state_facts(state: &State) -> Vec<String> {
    state
        .atoms
        .iter()
        .map(Atom::to_string)
        .chain(
            state
                .values
                .iter()
                .map(|(t, v)| format!("(= {t} {})", format_exact(*v))),
        )
        .collect()
}

pub fn serialize_problem(problem: &Problem) -> String {
    let num = Numbers::Exact;
    let goal: Vec<String> = problem
        .goal
        .iter()
        .map(|c| match c {
            Condition::Literal(l) => l.to_string(),
            Condition::Numeric(n) => condition_text(n, num),
        })
        .collect();
    format!(
        "(define (problem {})\n  (:domain {})\n  (:objects {})\n  (:init {})\n  (:goal {}))\n",
        problem.name,
        problem.domain,
        typed_list(&problem.objects),
        state_facts(&problem.init).join("\n         "),
        conjunction(&goal, "  ")
    )
}

pub fn serialize_trajectory(t: &Trajectory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(trajectory");
    let _ = writeln!(out, "  (:objects {})", typed_list(&t.objects));
    let _ = writeln!(out, "  (:init {})", state_facts(&t.init).join(" "));
    for tr in t.transitions() {
        let _ = writeln!(out, "  (operator: {})", tr.action);
        let _ = writeln!(out, "  (:state {})", state_facts(&tr.post).join(" "));
    }
    out.push_str(")\n");
    out
}
