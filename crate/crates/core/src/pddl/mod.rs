//! The PDDL 2.1 subset used by the learners: `:typing`, `:fluents` and
//! `:negative-preconditions`, plus the trajectory file format.

mod binding;
mod model;
mod parse;
pub mod sexpr;
mod write;

pub use binding::{bound_functions, bound_literals, groundings, ParameterBinding};
pub use model::*;
pub use parse::{parse_domain, parse_problem, parse_trajectory};
pub use write::{
    format_condition, format_expr, serialize_domain, serialize_domain_with_header,
    serialize_problem, serialize_trajectory,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported feature '{construct}' at {line}:{col}")]
    Unsupported {
        construct: String,
        line: usize,
        col: usize,
    },
    #[error("undeclared {kind} '{name}' (line {line})")]
    Undeclared {
        kind: &'static str,
        name: String,
        line: usize,
    },
    #[error("duplicate {kind} '{name}'")]
    Duplicate { kind: &'static str, name: String },
    #[error("'{name}' expects {expected} arguments, found {found} (line {line})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        line: usize,
    },
    #[error("'{name}' has type {found}, expected {expected} (line {line})")]
    TypeMismatch {
        name: String,
        expected: String,
        found: String,
        line: usize,
    },
    #[error("grounding {action} repeats an object across parameters")]
    NonInjective { action: String },
    #[error("transition {index}: pre-state differs from the previous post-state")]
    Chaining { index: usize },
    #[error("state after step {index} assigns a different set of functions (line {line})")]
    Totality { index: usize, line: usize },
    #[error("{0}")]
    Invalid(String),
}
