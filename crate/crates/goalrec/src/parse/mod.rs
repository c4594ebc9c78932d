//! Parsers and serializers for the textual formats: annotated domains,
//! problems, hypothesis files, and observation traces.
//!
//! The domain grammar is plain typed STRIPS extended with three extra blocks
//! inside each action body: `:poss-precondition`, `:poss-effect-add`, and
//! `:poss-effect-del`, each holding a conjunction of atoms. Removing those
//! blocks leaves a file loadable by ordinary PDDL tooling.

mod lexer;
mod writer;

pub use writer::{goal_line, serialize_domain, serialize_domain_stripped, serialize_problem};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ground::GroundedTask;
use crate::model::{
    ActionSignature, Fact, Hypothesis, IncompleteDomain, IncompleteOperator, Literal, ModelError,
    Parameter, PredicateSchema, RecognitionProblem, TypeTree, TypedObject, ROOT_TYPE,
};

use lexer::Cursor;

/// Line/column location of a token (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Position, message: String },
    #[error("semantic error at {pos}: {message}")]
    Semantic { pos: Position, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ParseError {
    fn syntax(pos: Position, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }

    fn semantic(pos: Position, message: impl Into<String>) -> Self {
        ParseError::Semantic {
            pos,
            message: message.into(),
        }
    }
}

const SUPPORTED_REQUIREMENTS: [&str; 2] = [":strips", ":typing"];

/// Parses an annotated domain file.
pub fn parse_domain(text: &str) -> Result<IncompleteDomain, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect_lparen()?;
    cur.expect_keyword("define")?;
    cur.expect_lparen()?;
    cur.expect_keyword("domain")?;
    let (name, _) = cur.expect_symbol()?;
    cur.expect_rparen()?;

    let mut types = TypeTree::new();
    let mut predicates: Vec<PredicateSchema> = Vec::new();
    let mut operators: Vec<IncompleteOperator> = Vec::new();
    let mut saw_types = false;
    let mut saw_predicates = false;

    while !cur.peek_is_rparen() {
        let open = cur.expect_lparen()?;
        let (section, pos) = cur.expect_symbol()?;
        match section.as_str() {
            ":requirements" => {
                while !cur.peek_is_rparen() {
                    let (req, rpos) = cur.expect_symbol()?;
                    if !SUPPORTED_REQUIREMENTS.contains(&req.as_str()) {
                        return Err(ParseError::semantic(
                            rpos,
                            format!("unsupported requirement `{req}`"),
                        ));
                    }
                }
                cur.expect_rparen()?;
            }
            ":types" => {
                if saw_types {
                    return Err(ParseError::semantic(pos, "duplicate `:types` section"));
                }
                saw_types = true;
                parse_types(&mut cur, &mut types)?;
            }
            ":predicates" => {
                if saw_predicates {
                    return Err(ParseError::semantic(pos, "duplicate `:predicates` section"));
                }
                saw_predicates = true;
                while cur.peek_is_lparen() {
                    predicates.push(parse_predicate_schema(&mut cur, &types)?);
                }
                cur.expect_rparen()?;
            }
            ":action" => {
                let op = parse_action(&mut cur, &predicates, &types)?;
                operators.push(op);
            }
            other => {
                return Err(ParseError::syntax(
                    if other.starts_with(':') { pos } else { open },
                    format!("unknown domain section `{other}`"),
                ));
            }
        }
    }
    cur.expect_rparen()?;
    if let Some(t) = cur.peek() {
        return Err(ParseError::syntax(
            t.pos,
            "trailing tokens after domain definition",
        ));
    }

    let domain = IncompleteDomain {
        name,
        types,
        predicates,
        operators,
    };
    domain.validate()?;
    Ok(domain)
}

fn parse_types(cur: &mut Cursor, types: &mut TypeTree) -> Result<(), ParseError> {
    // `a b - parent c d` groups; items without a parent default to the root.
    let mut pending: Vec<String> = Vec::new();
    loop {
        if cur.peek_is_rparen() {
            cur.expect_rparen()?;
            for t in pending {
                types.insert(&t, ROOT_TYPE);
            }
            return Ok(());
        }
        let (sym, pos) = cur.expect_symbol()?;
        if sym == "-" {
            let (parent, _) = cur.expect_symbol()?;
            if pending.is_empty() {
                return Err(ParseError::syntax(pos, "`-` without preceding type names"));
            }
            for t in pending.drain(..) {
                types.insert(&t, &parent);
            }
            // A parent mentioned only on the right-hand side is declared too.
            if !types.contains(&parent) {
                types.insert(&parent, ROOT_TYPE);
            }
        } else {
            pending.push(sym);
        }
    }
}

/// Parses a typed variable list until the closing paren (consumed).
fn parse_parameter_list(cur: &mut Cursor) -> Result<Vec<Parameter>, ParseError> {
    let mut params: Vec<Parameter> = Vec::new();
    let mut pending: Vec<(String, Position)> = Vec::new();
    loop {
        if cur.peek_is_rparen() {
            cur.expect_rparen()?;
            for (v, _) in pending {
                params.push(Parameter::new(v, ROOT_TYPE));
            }
            return Ok(params);
        }
        let (sym, pos) = cur.expect_symbol()?;
        if sym == "-" {
            let (type_name, _) = cur.expect_symbol()?;
            if pending.is_empty() {
                return Err(ParseError::syntax(pos, "`-` without preceding variables"));
            }
            for (v, _) in pending.drain(..) {
                params.push(Parameter::new(v, type_name.clone()));
            }
        } else {
            if !sym.starts_with('?') {
                return Err(ParseError::syntax(
                    pos,
                    format!("expected a `?variable`, found `{sym}`"),
                ));
            }
            pending.push((sym, pos));
        }
    }
}

fn parse_predicate_schema(
    cur: &mut Cursor,
    types: &TypeTree,
) -> Result<PredicateSchema, ParseError> {
    cur.expect_lparen()?;
    let (name, pos) = cur.expect_symbol()?;
    if name.starts_with(':') || name.starts_with('?') {
        return Err(ParseError::syntax(
            pos,
            format!("invalid predicate name `{name}`"),
        ));
    }
    let parameters = parse_parameter_list(cur)?;
    for p in &parameters {
        if !types.contains(&p.type_name) {
            return Err(ParseError::semantic(
                pos,
                format!("predicate `{name}` uses undeclared type `{}`", p.type_name),
            ));
        }
    }
    Ok(PredicateSchema { name, parameters })
}

const ACTION_BLOCKS: [&str; 5] = [
    ":precondition",
    ":poss-precondition",
    ":effect",
    ":poss-effect-add",
    ":poss-effect-del",
];

fn parse_action(
    cur: &mut Cursor,
    predicates: &[PredicateSchema],
    types: &TypeTree,
) -> Result<IncompleteOperator, ParseError> {
    let (name, name_pos) = cur.expect_symbol()?;
    if name.starts_with(':') {
        return Err(ParseError::syntax(name_pos, "action name missing"));
    }
    cur.expect_keyword(":parameters")?;
    cur.expect_lparen()?;
    let parameters = parse_parameter_list(cur)?;
    for p in &parameters {
        if !types.contains(&p.type_name) {
            return Err(ParseError::semantic(
                name_pos,
                format!("action `{name}` uses undeclared type `{}`", p.type_name),
            ));
        }
    }

    let mut op = IncompleteOperator {
        name: name.clone(),
        parameters,
        ..Default::default()
    };
    let mut seen: BTreeSet<String> = BTreeSet::new();
    while !cur.peek_is_rparen() {
        let (block, pos) = cur.expect_symbol()?;
        if !ACTION_BLOCKS.contains(&block.as_str()) {
            return Err(ParseError::syntax(
                pos,
                format!("unknown action block `{block}`"),
            ));
        }
        if !seen.insert(block.clone()) {
            return Err(ParseError::semantic(
                pos,
                format!("duplicate `{block}` block"),
            ));
        }
        let allow_negation = block == ":effect";
        let literals = parse_conjunction(cur, predicates, &op, allow_negation)?;
        for (lit, negated, lpos) in literals {
            let target = match block.as_str() {
                ":precondition" => &mut op.pre,
                ":poss-precondition" => &mut op.poss_pre,
                ":effect" => {
                    if negated {
                        &mut op.del
                    } else {
                        &mut op.add
                    }
                }
                ":poss-effect-add" => &mut op.poss_add,
                ":poss-effect-del" => &mut op.poss_del,
                _ => unreachable!(),
            };
            if !target.insert(lit.clone()) {
                return Err(ParseError::semantic(
                    lpos,
                    format!("duplicate literal `{lit}` in `{block}` of action `{name}`"),
                ));
            }
        }
    }
    cur.expect_rparen()?;
    Ok(op)
}

/// Parses a conjunction body: `(and ...)`, a single atom, or `()`.
/// Returns `(literal, negated, position)` triples.
fn parse_conjunction(
    cur: &mut Cursor,
    predicates: &[PredicateSchema],
    op: &IncompleteOperator,
    allow_negation: bool,
) -> Result<Vec<(Literal, bool, Position)>, ParseError> {
    cur.expect_lparen()?;
    let mut out = Vec::new();
    if cur.peek_is_rparen() {
        cur.expect_rparen()?;
        return Ok(out);
    }
    if cur.peek_symbol() == Some("and") {
        cur.expect_keyword("and")?;
        while !cur.peek_is_rparen() {
            cur.expect_lparen()?;
            out.push(parse_operator_literal(cur, predicates, op, allow_negation)?);
        }
        cur.expect_rparen()?;
    } else {
        out.push(parse_operator_literal(cur, predicates, op, allow_negation)?);
    }
    Ok(out)
}

/// Parses one literal after its opening paren was consumed.
fn parse_operator_literal(
    cur: &mut Cursor,
    predicates: &[PredicateSchema],
    op: &IncompleteOperator,
    allow_negation: bool,
) -> Result<(Literal, bool, Position), ParseError> {
    let (head, pos) = cur.expect_symbol()?;
    if head == "not" {
        if !allow_negation {
            return Err(ParseError::semantic(
                pos,
                "negation is only allowed inside `:effect` (negative preconditions are not supported)",
            ));
        }
        cur.expect_lparen()?;
        let (lit, negated, lpos) = parse_operator_literal(cur, predicates, op, false)?;
        if negated {
            return Err(ParseError::syntax(lpos, "double negation"));
        }
        cur.expect_rparen()?;
        return Ok((lit, true, lpos));
    }
    if head == "when" || head == "forall" || head == "exists" || head == "or" {
        return Err(ParseError::semantic(
            pos,
            format!("`{head}` is not supported (plain STRIPS only)"),
        ));
    }
    let mut args = Vec::new();
    while !cur.peek_is_rparen() {
        let (arg, apos) = cur.expect_symbol()?;
        if !arg.starts_with('?') {
            return Err(ParseError::syntax(
                apos,
                format!(
                    "expected a `?variable` argument, found `{arg}` (constants are not supported)"
                ),
            ));
        }
        args.push(arg);
    }
    cur.expect_rparen()?;

    let schema = predicates
        .iter()
        .find(|p| p.name == head)
        .ok_or_else(|| ParseError::semantic(pos, format!("undeclared predicate `{head}`")))?;
    if schema.arity() != args.len() {
        return Err(ParseError::semantic(
            pos,
            format!(
                "predicate `{head}` expects {} arguments, found {}",
                schema.arity(),
                args.len()
            ),
        ));
    }
    for a in &args {
        if !op.parameters.iter().any(|p| &p.variable == a) {
            return Err(ParseError::semantic(
                pos,
                format!("variable `{a}` is not a parameter of action `{}`", op.name),
            ));
        }
    }
    Ok((Literal::new(head, args), false, pos))
}

/// Parsed problem file: objects, initial state, and the (ignored) goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedObject>,
    pub init: BTreeSet<Fact>,
    /// The `:goal` section; recognition uses the hypotheses file instead.
    pub goal: BTreeSet<Fact>,
}

/// Parses a standard PDDL problem against an already-parsed domain.
pub fn parse_problem(domain: &IncompleteDomain, text: &str) -> Result<ProblemFile, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect_lparen()?;
    cur.expect_keyword("define")?;
    cur.expect_lparen()?;
    cur.expect_keyword("problem")?;
    let (name, _) = cur.expect_symbol()?;
    cur.expect_rparen()?;

    let mut domain_name = String::new();
    let mut objects: Vec<TypedObject> = Vec::new();
    let mut init: BTreeSet<Fact> = BTreeSet::new();
    let mut goal: BTreeSet<Fact> = BTreeSet::new();

    while !cur.peek_is_rparen() {
        cur.expect_lparen()?;
        let (section, pos) = cur.expect_symbol()?;
        match section.as_str() {
            ":domain" => {
                let (dname, dpos) = cur.expect_symbol()?;
                if dname != domain.name {
                    return Err(ParseError::semantic(
                        dpos,
                        format!(
                            "problem is for domain `{dname}`, expected `{}`",
                            domain.name
                        ),
                    ));
                }
                domain_name = dname;
                cur.expect_rparen()?;
            }
            ":objects" => {
                let mut pending: Vec<(String, Position)> = Vec::new();
                loop {
                    if cur.peek_is_rparen() {
                        cur.expect_rparen()?;
                        for (o, _) in pending {
                            objects.push(TypedObject::new(o, ROOT_TYPE));
                        }
                        break;
                    }
                    let (sym, spos) = cur.expect_symbol()?;
                    if sym == "-" {
                        let (type_name, tpos) = cur.expect_symbol()?;
                        if !domain.types.contains(&type_name) {
                            return Err(ParseError::semantic(
                                tpos,
                                format!("undeclared type `{type_name}`"),
                            ));
                        }
                        for (o, _) in pending.drain(..) {
                            objects.push(TypedObject::new(o, type_name.clone()));
                        }
                    } else {
                        if sym.starts_with('?') {
                            return Err(ParseError::syntax(
                                spos,
                                "object names cannot start with `?`",
                            ));
                        }
                        pending.push((sym, spos));
                    }
                }
                let mut seen = BTreeSet::new();
                for o in &objects {
                    if !seen.insert(o.name.clone()) {
                        return Err(ParseError::semantic(
                            pos,
                            format!("duplicate object `{}`", o.name),
                        ));
                    }
                }
            }
            ":init" => {
                while cur.peek_is_lparen() {
                    cur.expect_lparen()?;
                    let fact = parse_ground_fact(&mut cur, domain, &objects)?;
                    init.insert(fact);
                }
                cur.expect_rparen()?;
            }
            ":goal" => {
                cur.expect_lparen()?;
                if cur.peek_symbol() == Some("and") {
                    cur.expect_keyword("and")?;
                    while cur.peek_is_lparen() {
                        cur.expect_lparen()?;
                        goal.insert(parse_ground_fact(&mut cur, domain, &objects)?);
                    }
                    cur.expect_rparen()?;
                } else {
                    goal.insert(parse_ground_fact(&mut cur, domain, &objects)?);
                }
                cur.expect_rparen()?;
            }
            other => {
                return Err(ParseError::syntax(
                    pos,
                    format!("unknown problem section `{other}`"),
                ));
            }
        }
    }
    cur.expect_rparen()?;
    if domain_name.is_empty() {
        return Err(ParseError::semantic(
            cur.last_pos(),
            "missing `:domain` section",
        ));
    }
    Ok(ProblemFile {
        name,
        domain_name,
        objects,
        init,
        goal,
    })
}

/// Parses one ground atom after its opening paren was consumed; validates
/// predicate, arity, object declarations, and argument types.
fn parse_ground_fact(
    cur: &mut Cursor,
    domain: &IncompleteDomain,
    objects: &[TypedObject],
) -> Result<Fact, ParseError> {
    let (head, pos) = cur.expect_symbol()?;
    let mut args = Vec::new();
    while !cur.peek_is_rparen() {
        let (arg, _) = cur.expect_symbol()?;
        args.push(arg);
    }
    cur.expect_rparen()?;
    let schema = domain
        .predicate(&head)
        .ok_or_else(|| ParseError::semantic(pos, format!("undeclared predicate `{head}`")))?;
    if schema.arity() != args.len() {
        return Err(ParseError::semantic(
            pos,
            format!(
                "predicate `{head}` expects {} arguments, found {}",
                schema.arity(),
                args.len()
            ),
        ));
    }
    for (arg, param) in args.iter().zip(&schema.parameters) {
        let obj = objects
            .iter()
            .find(|o| &o.name == arg)
            .ok_or_else(|| ParseError::semantic(pos, format!("undeclared object `{arg}`")))?;
        if !domain.types.is_subtype(&obj.type_name, &param.type_name) {
            return Err(ParseError::semantic(
                pos,
                format!(
                    "object `{arg}` of type `{}` does not fit parameter of type `{}` in `{head}`",
                    obj.type_name, param.type_name
                ),
            ));
        }
    }
    Ok(Fact::new(head, args))
}

/// Parses a hypotheses file: one candidate goal per line, each a
/// parenthesized conjunction of ground atoms. Lines starting with `;` are
/// comments. At least one hypothesis is required.
pub fn parse_hypotheses(
    domain: &IncompleteDomain,
    objects: &[TypedObject],
    text: &str,
) -> Result<Vec<Hypothesis>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let goal = parse_goal_line(domain, objects, trimmed, i as u32 + 1)?;
        if goal.is_empty() {
            return Err(ParseError::semantic(
                Position {
                    line: i as u32 + 1,
                    col: 1,
                },
                "empty hypothesis",
            ));
        }
        out.push(goal);
    }
    if out.is_empty() {
        return Err(ParseError::semantic(
            Position { line: 1, col: 1 },
            "hypotheses file declares no candidate goals (at least one is required)",
        ));
    }
    Ok(out)
}

fn parse_goal_line(
    domain: &IncompleteDomain,
    objects: &[TypedObject],
    line: &str,
    line_no: u32,
) -> Result<Hypothesis, ParseError> {
    let adjust = |e: ParseError| match e {
        ParseError::Syntax { pos, message } => ParseError::Syntax {
            pos: Position {
                line: line_no,
                col: pos.col,
            },
            message,
        },
        ParseError::Semantic { pos, message } => ParseError::Semantic {
            pos: Position {
                line: line_no,
                col: pos.col,
            },
            message,
        },
        other => other,
    };
    let mut cur = Cursor::new(line);
    let mut goal = Hypothesis::new();
    let mut parse_inner = |cur: &mut Cursor| -> Result<(), ParseError> {
        cur.expect_lparen()?;
        if cur.peek_symbol() == Some("and") {
            cur.expect_keyword("and")?;
            while cur.peek_is_lparen() {
                cur.expect_lparen()?;
                goal.insert(parse_ground_fact(cur, domain, objects)?);
            }
            cur.expect_rparen()?;
        } else {
            goal.insert(parse_ground_fact(cur, domain, objects)?);
        }
        Ok(())
    };
    while !cur.at_end() {
        parse_inner(&mut cur).map_err(adjust)?;
    }
    Ok(goal)
}

/// Parses the hidden-goal companion file (same goal syntax, single goal) and
/// returns its index among `hypotheses`.
pub fn parse_hidden_goal(
    domain: &IncompleteDomain,
    objects: &[TypedObject],
    hypotheses: &[Hypothesis],
    text: &str,
) -> Result<usize, ParseError> {
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let goal = parse_goal_line(domain, objects, trimmed, i as u32 + 1)?;
        return hypotheses.iter().position(|h| h == &goal).ok_or_else(|| {
            ParseError::semantic(
                Position {
                    line: i as u32 + 1,
                    col: 1,
                },
                "hidden goal is not among the hypotheses",
            )
        });
    }
    Err(ParseError::semantic(
        Position { line: 1, col: 1 },
        "hidden-goal file is empty",
    ))
}

/// Parses observation lines syntactically: one `(name args...)` signature
/// per line, `;` starts a comment. No validation against any task; the
/// recognizer resolves signatures itself and reports unknown ones.
pub fn parse_observation_lines(text: &str) -> Result<Vec<ActionSignature>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let pos = Position {
            line: i as u32 + 1,
            col: 1,
        };
        let mut cur = Cursor::new(trimmed);
        cur.expect_lparen()
            .map_err(|_| ParseError::syntax(pos, "expected `(name args...)`"))?;
        let (name, _) = cur
            .expect_symbol()
            .map_err(|_| ParseError::syntax(pos, "missing action name"))?;
        let mut args = Vec::new();
        while !cur.peek_is_rparen() {
            let (a, _) = cur
                .expect_symbol()
                .map_err(|_| ParseError::syntax(pos, "unterminated signature"))?;
            args.push(a);
        }
        out.push(ActionSignature::new(name, args));
    }
    Ok(out)
}

/// Parses an observation trace: one ground action signature per line, e.g.
/// `(unstack a b)`. Lines starting with `;` are comments. Every signature is
/// validated against the grounded action set; order is preserved and
/// duplicates are permitted.
pub fn parse_observations(
    task: &GroundedTask,
    text: &str,
) -> Result<Vec<ActionSignature>, ParseError> {
    let signatures = parse_observation_lines(text)?;
    let mut line_numbers = text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        if t.is_empty() || t.starts_with(';') {
            None
        } else {
            Some(i as u32 + 1)
        }
    });
    for sig in &signatures {
        let line = line_numbers.next().unwrap_or(1);
        if task.action_by_signature(sig).is_none() {
            let message = if task.has_action_named(&sig.name) {
                format!("no grounding of `{}` matches signature `{sig}`", sig.name)
            } else {
                format!("unknown action `{sig}`")
            };
            return Err(ParseError::semantic(Position { line, col: 1 }, message));
        }
    }
    Ok(signatures)
}

/// Loads a full recognition problem from file contents. The observation and
/// hidden-goal texts are optional so partially assembled problems (e.g. when
/// only extracting landmarks) load with the same path.
pub fn load_recognition_problem(
    domain_text: &str,
    problem_text: &str,
    hypotheses_text: &str,
    hidden_goal_text: Option<&str>,
    observations_text: Option<&str>,
) -> Result<RecognitionProblem, ParseError> {
    let domain = parse_domain(domain_text)?;
    let problem = parse_problem(&domain, problem_text)?;
    let hypotheses = parse_hypotheses(&domain, &problem.objects, hypotheses_text)?;
    let hidden_goal = hidden_goal_text
        .map(|t| parse_hidden_goal(&domain, &problem.objects, &hypotheses, t))
        .transpose()?;
    let task = crate::ground::ground(&domain, &problem.objects, &problem.init)
        .map_err(|e| ParseError::semantic(Position { line: 1, col: 1 }, e.to_string()))?;
    let observations = match observations_text {
        Some(t) => parse_observations(&task, t)?,
        None => Vec::new(),
    };
    Ok(RecognitionProblem {
        domain,
        objects: problem.objects,
        init: problem.init,
        hypotheses,
        hidden_goal,
        observations,
    })
}
