use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::PddlError;
use crate::precision::Rounding;

/// Root of every type hierarchy.
pub const OBJECT_TYPE: &str = "object";

/// A predicate or function application. Arguments are either `?param`
/// variables (lifted) or object names (grounded).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Atom {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// Numeric state variables share the representation of atoms.
pub type FunctionTerm = Atom;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    /// Closed-world truth of this literal in `state`.
    pub fn holds(&self, state: &State) -> bool {
        state.atoms.contains(&self.atom) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumericExpr {
    Const(f64),
    Func(FunctionTerm),
    Binary(BinOp, Box<NumericExpr>, Box<NumericExpr>),
}

#[allow(clippy::should_implement_trait)]
impl NumericExpr {
    pub fn func(term: FunctionTerm) -> Self {
        NumericExpr::Func(term)
    }

    pub fn binary(op: BinOp, lhs: NumericExpr, rhs: NumericExpr) -> Self {
        NumericExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn add(lhs: NumericExpr, rhs: NumericExpr) -> Self {
        Self::binary(BinOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: NumericExpr, rhs: NumericExpr) -> Self {
        Self::binary(BinOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: NumericExpr, rhs: NumericExpr) -> Self {
        Self::binary(BinOp::Mul, lhs, rhs)
    }

    /// Left-nested binary sum; `None` for an empty iterator.
    pub fn sum(terms: impl IntoIterator<Item = NumericExpr>) -> Option<NumericExpr> {
        terms.into_iter().reduce(NumericExpr::add)
    }

    /// Evaluate with the function values of `values`. Every intermediate
    /// result passes through `rounding`.
    pub fn eval(
        &self,
        values: &BTreeMap<FunctionTerm, f64>,
        rounding: Rounding,
    ) -> Result<f64, EvalFailure> {
        match self {
            NumericExpr::Const(c) => Ok(*c),
            NumericExpr::Func(t) => values
                .get(t)
                .copied()
                .ok_or_else(|| EvalFailure::Undefined(t.clone())),
            NumericExpr::Binary(op, a, b) => {
                let x = a.eval(values, rounding)?;
                let y = b.eval(values, rounding)?;
                let v = match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalFailure::DivisionByZero);
                        }
                        x / y
                    }
                };
                Ok(rounding.apply(v))
            }
        }
    }

    /// Number of binary operator nodes.
    pub fn op_count(&self) -> usize {
        match self {
            NumericExpr::Binary(_, a, b) => 1 + a.op_count() + b.op_count(),
            _ => 0,
        }
    }

    pub fn functions(&self) -> Vec<&FunctionTerm> {
        let mut out = Vec::new();
        self.collect_functions(&mut out);
        out
    }

    fn collect_functions<'a>(&'a self, out: &mut Vec<&'a FunctionTerm>) {
        match self {
            NumericExpr::Const(_) => {}
            NumericExpr::Func(t) => out.push(t),
            NumericExpr::Binary(_, a, b) => {
                a.collect_functions(out);
                b.collect_functions(out);
            }
        }
    }

    /// Replace every argument through `f` (used for grounding and lifting).
    pub fn map_args(&self, f: &impl Fn(&str) -> String) -> NumericExpr {
        match self {
            NumericExpr::Const(c) => NumericExpr::Const(*c),
            NumericExpr::Func(t) => NumericExpr::Func(Atom {
                name: t.name.clone(),
                args: t.args.iter().map(|a| f(a)).collect(),
            }),
            NumericExpr::Binary(op, a, b) => {
                NumericExpr::binary(*op, a.map_args(f), b.map_args(f))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalFailure {
    Undefined(FunctionTerm),
    DivisionByZero,
}

impl fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalFailure::Undefined(t) => write!(f, "undefined function value {t}"),
            EvalFailure::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparison {
    Le,
    Lt,
    Eq,
    Gt,
    Ge,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Le => "<=",
            Comparison::Lt => "<",
            Comparison::Eq => "=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "<=" => Comparison::Le,
            "<" => Comparison::Lt,
            "=" => Comparison::Eq,
            ">" => Comparison::Gt,
            ">=" => Comparison::Ge,
            _ => return None,
        })
    }

    /// Relation with its operands swapped (`a < b` iff `b > a`).
    pub fn flipped(self) -> Self {
        match self {
            Comparison::Le => Comparison::Ge,
            Comparison::Lt => Comparison::Gt,
            Comparison::Eq => Comparison::Eq,
            Comparison::Gt => Comparison::Lt,
            Comparison::Ge => Comparison::Le,
        }
    }

    /// `lhs rel rhs`, relaxed by `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Comparison::Le => lhs <= rhs + tol,
            Comparison::Lt => lhs < rhs + tol,
            Comparison::Eq => (lhs - rhs).abs() <= tol,
            Comparison::Gt => lhs > rhs - tol,
            Comparison::Ge => lhs >= rhs - tol,
        }
    }
}

/// `lhs rel rhs` with a scalar right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCondition {
    pub lhs: NumericExpr,
    pub rel: Comparison,
    pub rhs: f64,
}

impl NumericCondition {
    pub fn new(lhs: NumericExpr, rel: Comparison, rhs: f64) -> Self {
        NumericCondition { lhs, rel, rhs }
    }

    pub fn holds(
        &self,
        values: &BTreeMap<FunctionTerm, f64>,
        tol: f64,
        rounding: Rounding,
    ) -> Result<bool, EvalFailure> {
        let v = self.lhs.eval(values, rounding)?;
        Ok(self.rel.holds(v, self.rhs, tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssignOp {
    Assign,
    Increase,
    Decrease,
}

impl AssignOp {
    pub fn keyword(self) -> &'static str {
        match self {
            AssignOp::Assign => "assign",
            AssignOp::Increase => "increase",
            AssignOp::Decrease => "decrease",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericEffect {
    pub target: FunctionTerm,
    pub op: AssignOp,
    pub expr: NumericExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

/// Predicate or function declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub params: Vec<TypedName>,
}

impl Signature {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub bool_pre: BTreeSet<Literal>,
    pub num_pre: Vec<NumericCondition>,
    pub bool_eff: BTreeSet<Literal>,
    pub num_eff: Vec<NumericEffect>,
}

impl ActionSchema {
    pub fn new(name: impl Into<String>, params: Vec<TypedName>) -> Self {
        ActionSchema {
            name: name.into(),
            params,
            ..Default::default()
        }
    }

    pub fn param_names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(type, parent)` pairs in declaration order.
    pub types: Vec<(String, String)>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<Signature>,
    pub functions: Vec<Signature>,
    pub actions: Vec<ActionSchema>,
}

impl DomainModel {
    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&Signature> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&Signature> {
        self.functions.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == OBJECT_TYPE || self.types.iter().any(|(t, _)| t == ty)
    }

    fn parent(&self, ty: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|(t, _)| t == ty)
            .map(|(_, p)| p.as_str())
    }

    /// Whether `sub` equals `sup` or descends from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sup == OBJECT_TYPE {
            return true;
        }
        let mut cur = sub;
        // bounded walk guards against cyclic declarations
        for _ in 0..=self.types.len() {
            if cur == sup {
                return true;
            }
            match self.parent(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }
}

/// Closed-world state: only true atoms are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct State {
    pub atoms: BTreeSet<Atom>,
    pub values: BTreeMap<FunctionTerm, f64>,
}

impl State {
    pub fn value(&self, term: &FunctionTerm) -> Option<f64> {
        self.values.get(term).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
}

impl GroundAction {
    pub fn new(name: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        GroundAction {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub pre: State,
    pub action: GroundAction,
    pub post: State,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub objects: Vec<TypedName>,
    pub init: State,
    transitions: Vec<Transition>,
}

impl Trajectory {
    /// Empty trajectory rooted at `init`.
    pub fn new(objects: Vec<TypedName>, init: State) -> Self {
        Trajectory {
            objects,
            init,
            transitions: Vec::new(),
        }
    }

    /// Build from explicit transitions, enforcing that each post-state equals
    /// the next pre-state.
    pub fn from_transitions(
        objects: Vec<TypedName>,
        transitions: Vec<Transition>,
    ) -> Result<Self, PddlError> {
        for (i, pair) in transitions.windows(2).enumerate() {
            if pair[0].post != pair[1].pre {
                return Err(PddlError::Chaining { index: i + 1 });
            }
        }
        for (i, t) in transitions.iter().enumerate() {
            if !same_function_set(&t.pre, &t.post) {
                return Err(PddlError::Invalid(format!(
                    "transition {i}: pre and post states assign different function sets"
                )));
            }
        }
        let init = transitions
            .first()
            .map(|t| t.pre.clone())
            .unwrap_or_default();
        Ok(Trajectory {
            objects,
            init,
            transitions,
        })
    }

    pub fn push(&mut self, action: GroundAction, post: State) {
        let pre = self.last_state().clone();
        self.transitions.push(Transition { pre, action, post });
    }

    pub fn last_state(&self) -> &State {
        self.transitions.last().map(|t| &t.post).unwrap_or(&self.init)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.ty.as_str())
    }
}

pub(crate) fn same_function_set(a: &State, b: &State) -> bool {
    a.values.len() == b.values.len() && a.values.keys().all(|k| b.values.contains_key(k))
}

/// Boolean literal or numeric comparison; used for problem goals.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Literal(Literal),
    Numeric(NumericCondition),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: State,
    pub goal: Vec<Condition>,
}

impl Problem {
    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.ty.as_str())
    }
}
