//! Parsers for domains, problems and trajectory files.

use std::collections::{BTreeMap, BTreeSet};

use super::model::*;
use super::sexpr::{self, syntax, Pos, Sexp};
use super::PddlError;

const UNSUPPORTED_REQUIREMENTS: &[&str] = &[
    ":durative-actions",
    ":conditional-effects",
    ":derived-predicates",
    ":duration-inequalities",
    ":continuous-effects",
    ":timed-initial-literals",
    ":processes",
    ":probabilistic-effects",
];

fn unsupported(construct: &str, pos: Pos) -> PddlError {
    PddlError::Unsupported {
        construct: construct.to_string(),
        line: pos.line,
        col: pos.col,
    }
}

fn expect_list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], PddlError> {
    s.as_list()
        .ok_or_else(|| syntax(s.pos(), format!("expected list for {what}")))
}

fn expect_symbol<'a>(s: &'a Sexp, what: &str) -> Result<&'a str, PddlError> {
    s.as_symbol()
        .ok_or_else(|| syntax(s.pos(), format!("expected symbol for {what}")))
}

/// Decimal literal without exponent.
pub(crate) fn parse_number(s: &str) -> Option<f64> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty()
        || !body.chars().all(|c| c.is_ascii_digit() || c == '.')
        || body.chars().filter(|&c| c == '.').count() > 1
        || !body.chars().any(|c| c.is_ascii_digit())
    {
        return None;
    }
    s.parse().ok()
}

/// `?a ?b - t ?c` style list.
fn parse_typed_list(items: &[Sexp]) -> Result<Vec<TypedName>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = expect_symbol(&items[i], "typed list entry")?;
        if sym == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax(items[i].pos(), "missing type after '-'"))?;
            if ty.head() == Some("either") {
                return Err(unsupported("either types", ty.pos()));
            }
            let ty = expect_symbol(ty, "type name")?;
            if pending.is_empty() {
                return Err(syntax(items[i].pos(), "type without names"));
            }
            out.extend(pending.drain(..).map(|n| TypedName::new(n, ty)));
            i += 2;
        } else {
            pending.push(sym.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| TypedName::new(n, OBJECT_TYPE)));
    Ok(out)
}

fn parse_signature(s: &Sexp) -> Result<Signature, PddlError> {
    let items = expect_list(s, "declaration")?;
    let (name, rest) = items
        .split_first()
        .ok_or_else(|| syntax(s.pos(), "empty declaration"))?;
    Ok(Signature {
        name: expect_symbol(name, "declaration name")?.to_string(),
        params: parse_typed_list(rest)?,
    })
}

/// Section keyword of a `(:keyword ...)` form.
fn section(s: &Sexp) -> Option<(&str, &[Sexp])> {
    let items = s.as_list()?;
    let (head, rest) = items.split_first()?;
    Some((head.as_symbol()?, rest))
}

/// Symbol scope used to validate atoms and expressions.
struct Scope<'a> {
    domain: &'a DomainModel,
    /// variable or object name -> type
    names: BTreeMap<String, String>,
    lifted: bool,
}

impl Scope<'_> {
    fn check_args(&self, sig: &Signature, args: &[String], pos: Pos) -> Result<(), PddlError> {
        if sig.arity() != args.len() {
            return Err(PddlError::Arity {
                name: sig.name.clone(),
                expected: sig.arity(),
                found: args.len(),
                line: pos.line,
            });
        }
        for (arg, param) in args.iter().zip(&sig.params) {
            let ty = self.names.get(arg).ok_or_else(|| PddlError::Undeclared {
                kind: if self.lifted { "parameter" } else { "object" },
                name: arg.clone(),
                line: pos.line,
            })?;
            if !self.domain.is_subtype(ty, &param.ty) {
                return Err(PddlError::TypeMismatch {
                    name: arg.clone(),
                    expected: param.ty.clone(),
                    found: ty.clone(),
                    line: pos.line,
                });
            }
        }
        Ok(())
    }

    fn atom(&self, s: &Sexp) -> Result<Atom, PddlError> {
        let items = expect_list(s, "atom")?;
        let (head, rest) = items
            .split_first()
            .ok_or_else(|| syntax(s.pos(), "empty atom"))?;
        let name = expect_symbol(head, "predicate name")?;
        let args = rest
            .iter()
            .map(|a| expect_symbol(a, "argument").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let sig = self.domain.predicate(name).ok_or(PddlError::Undeclared {
            kind: "predicate",
            name: name.to_string(),
            line: s.pos().line,
        })?;
        self.check_args(sig, &args, s.pos())?;
        Ok(Atom::new(name, args))
    }

    fn function_term(&self, s: &Sexp) -> Result<FunctionTerm, PddlError> {
        let items = expect_list(s, "function term")?;
        let (head, rest) = items
            .split_first()
            .ok_or_else(|| syntax(s.pos(), "empty function term"))?;
        let name = expect_symbol(head, "function name")?;
        let args = rest
            .iter()
            .map(|a| expect_symbol(a, "argument").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let sig = self.domain.function(name).ok_or(PddlError::Undeclared {
            kind: "function",
            name: name.to_string(),
            line: s.pos().line,
        })?;
        self.check_args(sig, &args, s.pos())?;
        Ok(Atom::new(name, args))
    }

    fn expr(&self, s: &Sexp) -> Result<NumericExpr, PddlError> {
        match s {
            Sexp::Symbol(sym, pos) => parse_number(sym)
                .map(NumericExpr::Const)
                .ok_or_else(|| syntax(*pos, format!("expected number, found '{sym}'"))),
            Sexp::List(items, pos) => {
                let head = items
                    .first()
                    .and_then(Sexp::as_symbol)
                    .ok_or_else(|| syntax(*pos, "expected operator or function name"))?;
                let op = match head {
                    "+" => Some(BinOp::Add),
                    "-" => Some(BinOp::Sub),
                    "*" => Some(BinOp::Mul),
                    "/" => Some(BinOp::Div),
                    _ => None,
                };
                let Some(op) = op else {
                    return Ok(NumericExpr::Func(self.function_term(s)?));
                };
                let operands = items[1..]
                    .iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let expr = match (op, operands.len()) {
                    (_, 0) => return Err(syntax(*pos, format!("'{head}' without operands"))),
                    (BinOp::Sub, 1) => {
                        NumericExpr::sub(NumericExpr::Const(0.0), operands.into_iter().next().unwrap())
                    }
                    (_, 1) => return Err(syntax(*pos, format!("'{head}' needs two operands"))),
                    (BinOp::Add | BinOp::Mul, _) => operands
                        .into_iter()
                        .reduce(|a, b| NumericExpr::binary(op, a, b))
                        .unwrap(),
                    (_, 2) => {
                        let mut it = operands.into_iter();
                        NumericExpr::binary(op, it.next().unwrap(), it.next().unwrap())
                    }
                    _ => return Err(syntax(*pos, format!("'{head}' is binary"))),
                };
                if let NumericExpr::Binary(BinOp::Div, _, d) = &expr {
                    if matches!(**d, NumericExpr::Const(c) if c == 0.0) {
                        return Err(syntax(*pos, "division by constant zero"));
                    }
                }
                Ok(expr)
            }
        }
    }

    fn comparison(&self, rel: Comparison, lhs: &Sexp, rhs: &Sexp) -> Result<NumericCondition, PddlError> {
        let l = self.expr(lhs)?;
        let r = self.expr(rhs)?;
        Ok(match (l, r) {
            (l, NumericExpr::Const(c)) => NumericCondition::new(l, rel, c),
            (NumericExpr::Const(c), r) => NumericCondition::new(r, rel.flipped(), c),
            (l, r) => NumericCondition::new(NumericExpr::sub(l, r), rel, 0.0),
        })
    }

    /// Conjunctive goal description.
    fn conditions(&self, s: &Sexp, out: &mut Vec<Condition>) -> Result<(), PddlError> {
        let items = expect_list(s, "condition")?;
        let Some(head) = items.first().and_then(Sexp::as_symbol) else {
            if items.is_empty() {
                return Ok(());
            }
            return Err(syntax(s.pos(), "malformed condition"));
        };
        match head {
            "and" => {
                for c in &items[1..] {
                    self.conditions(c, out)?;
                }
            }
            "not" => {
                let inner = items
                    .get(1)
                    .filter(|_| items.len() == 2)
                    .ok_or_else(|| syntax(s.pos(), "'not' takes one argument"))?;
                if inner.head().and_then(Comparison::from_symbol).is_some() {
                    return Err(unsupported("negated numeric comparison", s.pos()));
                }
                out.push(Condition::Literal(Literal::neg(self.atom(inner)?)));
            }
            "or" | "imply" | "forall" | "exists" | "when" => return Err(unsupported(head, s.pos())),
            _ => {
                if let Some(rel) = Comparison::from_symbol(head) {
                    if items.len() != 3 {
                        return Err(syntax(s.pos(), format!("'{head}' takes two operands")));
                    }
                    let bare_name = |e: &Sexp| e.as_symbol().is_some_and(|t| parse_number(t).is_none());
                    if bare_name(&items[1]) || bare_name(&items[2]) {
                        return Err(unsupported("object equality", s.pos()));
                    }
                    out.push(Condition::Numeric(self.comparison(rel, &items[1], &items[2])?));
                } else {
                    out.push(Condition::Literal(Literal::pos(self.atom(s)?)));
                }
            }
        }
        Ok(())
    }

    fn effects(&self, s: &Sexp, action: &mut ActionSchema) -> Result<(), PddlError> {
        let items = expect_list(s, "effect")?;
        let Some(head) = items.first().and_then(Sexp::as_symbol) else {
            if items.is_empty() {
                return Ok(());
            }
            return Err(syntax(s.pos(), "malformed effect"));
        };
        match head {
            "and" => {
                for e in &items[1..] {
                    self.effects(e, action)?;
                }
            }
            "not" => {
                let inner = items
                    .get(1)
                    .filter(|_| items.len() == 2)
                    .ok_or_else(|| syntax(s.pos(), "'not' takes one argument"))?;
                action.bool_eff.insert(Literal::neg(self.atom(inner)?));
            }
            "assign" | "increase" | "decrease" => {
                if items.len() != 3 {
                    return Err(syntax(s.pos(), format!("'{head}' takes two operands")));
                }
                let op = match head {
                    "assign" => AssignOp::Assign,
                    "increase" => AssignOp::Increase,
                    _ => AssignOp::Decrease,
                };
                let target = self.function_term(&items[1])?;
                let expr = self.expr(&items[2])?;
                if action.num_eff.iter().any(|e| e.target == target && e.op == op) {
                    return Err(PddlError::Invalid(format!(
                        "action {}: duplicate {head} effect on {target}",
                        action.name
                    )));
                }
                action.num_eff.push(NumericEffect { target, op, expr });
            }
            "scale-up" | "scale-down" | "when" | "forall" | "at" => {
                return Err(unsupported(head, s.pos()))
            }
            _ => {
                action.bool_eff.insert(Literal::pos(self.atom(s)?));
            }
        }
        Ok(())
    }
}

pub fn parse_domain(text: &str) -> Result<DomainModel, PddlError> {
    let root = sexpr::parse_one(text)?;
    let items = expect_list(&root, "domain")?;
    if root.head() != Some("define") || items.len() < 2 {
        return Err(syntax(root.pos(), "expected (define (domain <name>) ...)"));
    }
    let name_form = expect_list(&items[1], "domain name")?;
    if name_form.len() != 2 || name_form[0].as_symbol() != Some("domain") {
        return Err(syntax(items[1].pos(), "expected (domain <name>)"));
    }
    let mut domain = DomainModel {
        name: expect_symbol(&name_form[1], "domain name")?.to_string(),
        ..Default::default()
    };
    let mut action_forms = Vec::new();
    for part in &items[2..] {
        let (key, rest) = section(part).ok_or_else(|| syntax(part.pos(), "expected section"))?;
        match key {
            ":requirements" => {
                for r in rest {
                    let r = expect_symbol(r, "requirement")?;
                    if UNSUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(unsupported(r, part.pos()));
                    }
                    domain.requirements.push(r.to_string());
                }
            }
            ":types" => {
                for t in parse_typed_list(rest)? {
                    if domain.types.iter().any(|(n, _)| *n == t.name) {
                        return Err(PddlError::Duplicate { kind: "type", name: t.name });
                    }
                    domain.types.push((t.name, t.ty));
                }
            }
            ":constants" => domain.constants = parse_typed_list(rest)?,
            ":predicates" => {
                for p in rest {
                    let sig = parse_signature(p)?;
                    if domain.predicate(&sig.name).is_some() {
                        return Err(PddlError::Duplicate { kind: "predicate", name: sig.name });
                    }
                    domain.predicates.push(sig);
                }
            }
            ":functions" => {
                let mut i = 0;
                while i < rest.len() {
                    if rest[i].as_symbol() == Some("-") {
                        let ty = rest.get(i + 1).and_then(Sexp::as_symbol);
                        if ty != Some("number") {
                            return Err(unsupported("non-number function type", rest[i].pos()));
                        }
                        i += 2;
                        continue;
                    }
                    let sig = parse_signature(&rest[i])?;
                    if domain.function(&sig.name).is_some() {
                        return Err(PddlError::Duplicate { kind: "function", name: sig.name });
                    }
                    domain.functions.push(sig);
                    i += 1;
                }
            }
            ":action" => action_forms.push(part),
            ":durative-action" | ":derived" | ":process" | ":event" => {
                return Err(unsupported(key, part.pos()))
            }
            other => return Err(syntax(part.pos(), format!("unknown domain section '{other}'"))),
        }
    }
    validate_types(&domain)?;
    for form in action_forms {
        let action = parse_action(&domain, form)?;
        if domain.action(&action.name).is_some() {
            return Err(PddlError::Duplicate { kind: "action", name: action.name });
        }
        domain.actions.push(action);
    }
    Ok(domain)
}

fn validate_types(domain: &DomainModel) -> Result<(), PddlError> {
    let check = |ty: &str| {
        if domain.has_type(ty) {
            Ok(())
        } else {
            Err(PddlError::Undeclared {
                kind: "type",
                name: ty.to_string(),
                line: 0,
            })
        }
    };
    for (_, parent) in &domain.types {
        check(parent)?;
    }
    for c in &domain.constants {
        check(&c.ty)?;
    }
    for sig in domain.predicates.iter().chain(&domain.functions) {
        for p in &sig.params {
            check(&p.ty)?;
        }
    }
    Ok(())
}

fn parse_action(domain: &DomainModel, form: &Sexp) -> Result<ActionSchema, PddlError> {
    let items = expect_list(form, "action")?;
    let name = items
        .get(1)
        .ok_or_else(|| syntax(form.pos(), "action without name"))?;
    let mut action = ActionSchema::new(expect_symbol(name, "action name")?, Vec::new());
    let mut pre = None;
    let mut eff = None;
    let mut i = 2;
    while i < items.len() {
        let key = expect_symbol(&items[i], "action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(items[i].pos(), format!("missing value for {key}")))?;
        match key {
            ":parameters" => action.params = parse_typed_list(expect_list(value, "parameters")?)?,
            ":precondition" => pre = Some(value),
            ":effect" => eff = Some(value),
            other => return Err(syntax(items[i].pos(), format!("unknown action keyword '{other}'"))),
        }
        i += 2;
    }
    let mut names = BTreeMap::new();
    for p in &action.params {
        if !p.name.starts_with('?') {
            return Err(syntax(form.pos(), format!("parameter '{}' must start with '?'", p.name)));
        }
        if !domain.has_type(&p.ty) {
            return Err(PddlError::Undeclared {
                kind: "type",
                name: p.ty.clone(),
                line: form.pos().line,
            });
        }
        if names.insert(p.name.clone(), p.ty.clone()).is_some() {
            return Err(PddlError::Duplicate { kind: "parameter", name: p.name.clone() });
        }
    }
    for c in &domain.constants {
        names.insert(c.name.clone(), c.ty.clone());
    }
    let scope = Scope {
        domain,
        names,
        lifted: true,
    };
    if let Some(pre) = pre {
        let mut conds = Vec::new();
        scope.conditions(pre, &mut conds)?;
        for c in conds {
            match c {
                Condition::Literal(l) => {
                    action.bool_pre.insert(l);
                }
                Condition::Numeric(n) => action.num_pre.push(n),
            }
        }
    }
    if let Some(eff) = eff {
        scope.effects(eff, &mut action)?;
    }
    Ok(action)
}

fn object_scope<'a>(domain: &'a DomainModel, objects: &[TypedName]) -> Result<Scope<'a>, PddlError> {
    let mut names = BTreeMap::new();
    for o in domain.constants.iter().chain(objects) {
        if !domain.has_type(&o.ty) {
            return Err(PddlError::Undeclared {
                kind: "type",
                name: o.ty.clone(),
                line: 0,
            });
        }
        names.insert(o.name.clone(), o.ty.clone());
    }
    Ok(Scope {
        domain,
        names,
        lifted: false,
    })
}

/// Ground atoms and `(= (f ...) v)` assignments.
fn parse_state_facts(scope: &Scope, facts: &[Sexp]) -> Result<State, PddlError> {
    let mut state = State::default();
    for f in facts {
        if f.head() == Some("=") {
            let items = expect_list(f, "fluent assignment")?;
            if items.len() != 3 {
                return Err(syntax(f.pos(), "expected (= (<fn> <obj>*) <number>)"));
            }
            let term = scope.function_term(&items[1])?;
            let value = items[2]
                .as_symbol()
                .and_then(parse_number)
                .ok_or_else(|| syntax(items[2].pos(), "expected number"))?;
            if state.values.insert(term.clone(), value).is_some() {
                return Err(PddlError::Invalid(format!("function {term} assigned twice")));
            }
        } else if f.head() == Some("not") {
            return Err(syntax(f.pos(), "states list only true atoms"));
        } else {
            state.atoms.insert(scope.atom(f)?);
        }
    }
    Ok(state)
}

pub fn parse_problem(text: &str, domain: &DomainModel) -> Result<Problem, PddlError> {
    let root = sexpr::parse_one(text)?;
    let items = expect_list(&root, "problem")?;
    if root.head() != Some("define") || items.len() < 2 {
        return Err(syntax(root.pos(), "expected (define (problem <name>) ...)"));
    }
    let name_form = expect_list(&items[1], "problem name")?;
    if name_form.len() != 2 || name_form[0].as_symbol() != Some("problem") {
        return Err(syntax(items[1].pos(), "expected (problem <name>)"));
    }
    let mut problem = Problem {
        name: expect_symbol(&name_form[1], "problem name")?.to_string(),
        ..Default::default()
    };
    let mut init = None;
    let mut goal = None;
    for part in &items[2..] {
        let (key, rest) = section(part).ok_or_else(|| syntax(part.pos(), "expected section"))?;
        match key {
            ":domain" => {
                problem.domain = rest
                    .first()
                    .map(|d| expect_symbol(d, "domain name"))
                    .transpose()?
                    .unwrap_or_default()
                    .to_string()
            }
            ":requirements" => {}
            ":objects" => problem.objects = parse_typed_list(rest)?,
            ":init" => init = Some(rest),
            ":goal" => goal = rest.first(),
            // optimization metrics carry no information for learning or validation
            ":metric" => {}
            other => return Err(syntax(part.pos(), format!("unknown problem section '{other}'"))),
        }
    }
    let scope = object_scope(domain, &problem.objects)?;
    if let Some(init) = init {
        problem.init = parse_state_facts(&scope, init)?;
    }
    if let Some(goal) = goal {
        scope.conditions(goal, &mut problem.goal)?;
    }
    Ok(problem)
}

pub fn parse_trajectory(text: &str, domain: &DomainModel) -> Result<Trajectory, PddlError> {
    let root = sexpr::parse_one(text)?;
    let items = expect_list(&root, "trajectory")?;
    if root.head() != Some("trajectory") {
        return Err(syntax(root.pos(), "expected (trajectory ...)"));
    }
    let mut rest = &items[1..];
    let objects = match rest.first().and_then(section) {
        Some((":objects", objs)) => {
            rest = &rest[1..];
            parse_typed_list(objs)?
        }
        _ => Vec::new(),
    };
    let scope = object_scope(domain, &objects)?;
    let init = match rest.first().and_then(section) {
        Some((":init", facts)) => {
            rest = &rest[1..];
            parse_state_facts(&scope, facts)?
        }
        _ => return Err(syntax(root.pos(), "trajectory without (:init ...)")),
    };
    // Accept both the flat form `(operator: ..) (:state ..)` and steps
    // wrapped in an extra list `((operator: ..) (:state ..))`.
    let mut flat: Vec<&Sexp> = Vec::new();
    for s in rest {
        let wrapped = s
            .as_list()
            .filter(|l| l.len() == 2 && l.iter().all(|x| x.as_list().is_some()))
            .filter(|l| l[0].head() == Some("operator:"));
        match wrapped {
            Some(pair) => flat.extend(pair.iter()),
            None => flat.push(s),
        }
    }
    if !flat.len().is_multiple_of(2) {
        return Err(syntax(root.pos(), "every operator must be followed by a (:state ...)"));
    }
    let mut trajectory = Trajectory::new(objects, init);
    for step in flat.chunks(2) {
        let op = match section(step[0]) {
            Some(("operator:", [action])) => action,
            _ => return Err(syntax(step[0].pos(), "expected (operator: (<action> <obj>*))")),
        };
        let facts = match section(step[1]) {
            Some((":state", facts)) => facts,
            _ => return Err(syntax(step[1].pos(), "expected (:state ...)")),
        };
        let action = parse_ground_action(&scope, op)?;
        let post = parse_state_facts(&scope, facts)?;
        if !same_function_set(trajectory.last_state(), &post) {
            return Err(PddlError::Totality {
                index: trajectory.len(),
                line: step[1].pos().line,
            });
        }
        trajectory.push(action, post);
    }
    Ok(trajectory)
}

fn parse_ground_action(scope: &Scope, s: &Sexp) -> Result<GroundAction, PddlError> {
    let items = expect_list(s, "grounded action")?;
    let (head, rest) = items
        .split_first()
        .ok_or_else(|| syntax(s.pos(), "empty grounded action"))?;
    let name = expect_symbol(head, "action name")?;
    let args = rest
        .iter()
        .map(|a| expect_symbol(a, "object").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    let schema = scope.domain.action(name).ok_or(PddlError::Undeclared {
        kind: "action",
        name: name.to_string(),
        line: s.pos().line,
    })?;
    let sig = Signature {
        name: name.to_string(),
        params: schema.params.clone(),
    };
    scope.check_args(&sig, &args, s.pos())?;
    let distinct: BTreeSet<&String> = args.iter().collect();
    if distinct.len() != args.len() {
        return Err(PddlError::NonInjective {
            action: GroundAction::new(name, args.clone()).to_string(),
        });
    }
    Ok(GroundAction::new(name, args))
}
