//! Data model for lifted incomplete STRIPS domains and goal recognition
//! problems.
//!
//! An incomplete operator carries, besides the usual precondition/add/delete
//! sets, three *possible* sets (possible preconditions, possible add effects,
//! possible delete effects) whose membership in the true model is unknown.
//! A model with `2^K` completions has `K` literals spread over the possible
//! sets of its operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Root of the type tree; parameters without an explicit type default to it.
pub const ROOT_TYPE: &str = "object";

/// Single-inheritance type tree rooted at [`ROOT_TYPE`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeTree {
    parent: BTreeMap<String, String>,
}

impl TypeTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `child` under `parent`. Declaring the root is a no-op.
    pub fn insert(&mut self, child: &str, parent: &str) {
        if child != ROOT_TYPE {
            self.parent.insert(child.to_string(), parent.to_string());
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        name == ROOT_TYPE || self.parent.contains_key(name)
    }

    /// Reflexive-transitive subtype test. Every declared type is a subtype of
    /// [`ROOT_TYPE`].
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == ROOT_TYPE {
            return true;
        }
        let mut current = sub;
        while let Some(p) = self.parent.get(current) {
            if p == sup {
                return true;
            }
            current = p;
        }
        false
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Iterates `(child, parent)` pairs in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parent.iter().map(|(c, p)| (c.as_str(), p.as_str()))
    }
}

/// A typed parameter of a predicate or operator: `(?x, block)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Parameter {
    pub variable: String,
    pub type_name: String,
}

impl Parameter {
    pub fn new(variable: impl Into<String>, type_name: impl Into<String>) -> Self {
        Parameter {
            variable: variable.into(),
            type_name: type_name.into(),
        }
    }
}

/// Declared predicate: name plus typed parameter list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub parameters: Vec<Parameter>,
}

impl PredicateSchema {
    pub fn arity(&self) -> usize {
        self.parameters.len()
    }
}

/// Lifted atom inside an operator body; arguments are parameter variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Literal {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        Literal {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// Ground atom: an instantiated predicate over object names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        Fact {
            predicate: predicate.into(),
            args,
        }
    }

    /// Propositional fact (zero-ary predicate).
    pub fn atom(predicate: impl Into<String>) -> Self {
        Fact {
            predicate: predicate.into(),
            args: Vec::new(),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// The three literal categories an operator tracks both known and possible
/// sets for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LiteralCategory {
    Precondition,
    AddEffect,
    DelEffect,
}

impl LiteralCategory {
    pub const ALL: [LiteralCategory; 3] = [
        LiteralCategory::Precondition,
        LiteralCategory::AddEffect,
        LiteralCategory::DelEffect,
    ];
}

/// Lifted operator with known and possible precondition/effect sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IncompleteOperator {
    pub name: String,
    pub parameters: Vec<Parameter>,
    pub pre: BTreeSet<Literal>,
    pub poss_pre: BTreeSet<Literal>,
    pub add: BTreeSet<Literal>,
    pub del: BTreeSet<Literal>,
    pub poss_add: BTreeSet<Literal>,
    pub poss_del: BTreeSet<Literal>,
}

impl IncompleteOperator {
    pub fn known_set(&self, category: LiteralCategory) -> &BTreeSet<Literal> {
        match category {
            LiteralCategory::Precondition => &self.pre,
            LiteralCategory::AddEffect => &self.add,
            LiteralCategory::DelEffect => &self.del,
        }
    }

    pub fn known_set_mut(&mut self, category: LiteralCategory) -> &mut BTreeSet<Literal> {
        match category {
            LiteralCategory::Precondition => &mut self.pre,
            LiteralCategory::AddEffect => &mut self.add,
            LiteralCategory::DelEffect => &mut self.del,
        }
    }

    pub fn possible_set(&self, category: LiteralCategory) -> &BTreeSet<Literal> {
        match category {
            LiteralCategory::Precondition => &self.poss_pre,
            LiteralCategory::AddEffect => &self.poss_add,
            LiteralCategory::DelEffect => &self.poss_del,
        }
    }

    pub fn possible_set_mut(&mut self, category: LiteralCategory) -> &mut BTreeSet<Literal> {
        match category {
            LiteralCategory::Precondition => &mut self.poss_pre,
            LiteralCategory::AddEffect => &mut self.poss_add,
            LiteralCategory::DelEffect => &mut self.poss_del,
        }
    }

    /// Number of literals in the three possible sets.
    pub fn possible_count(&self) -> usize {
        self.poss_pre.len() + self.poss_add.len() + self.poss_del.len()
    }

    pub fn is_complete(&self) -> bool {
        self.possible_count() == 0
    }
}

/// Lifted incomplete domain: types, predicates, and incomplete operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteDomain {
    pub name: String,
    pub types: TypeTree,
    pub predicates: Vec<PredicateSchema>,
    pub operators: Vec<IncompleteOperator>,
}

impl IncompleteDomain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn operator(&self, name: &str) -> Option<&IncompleteOperator> {
        self.operators.iter().find(|o| o.name == name)
    }

    /// True when every operator has empty possible sets (plain STRIPS).
    pub fn is_complete(&self) -> bool {
        self.operators.iter().all(|o| o.is_complete())
    }

    /// A copy with all possible sets dropped: the classical projection used
    /// when comparing against plain STRIPS behaviour.
    pub fn stripped(&self) -> IncompleteDomain {
        let mut out = self.clone();
        for op in &mut out.operators {
            op.poss_pre.clear();
            op.poss_add.clear();
            op.poss_del.clear();
        }
        out
    }

    /// Checks the structural invariants of the model.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        let mut seen_preds = BTreeSet::new();
        for p in &self.predicates {
            if p.name.is_empty() {
                return Err(ModelError::EmptyName);
            }
            if !seen_preds.insert(p.name.clone()) {
                return Err(ModelError::DuplicatePredicate(p.name.clone()));
            }
            let mut vars = BTreeSet::new();
            for param in &p.parameters {
                if !vars.insert(param.variable.clone()) {
                    return Err(ModelError::DuplicateParameter {
                        owner: p.name.clone(),
                        variable: param.variable.clone(),
                    });
                }
            }
        }
        let mut seen_ops = BTreeSet::new();
        for op in &self.operators {
            if !seen_ops.insert(op.name.clone()) {
                return Err(ModelError::DuplicateOperator(op.name.clone()));
            }
            let mut vars = BTreeSet::new();
            for param in &op.parameters {
                if !vars.insert(param.variable.clone()) {
                    return Err(ModelError::DuplicateParameter {
                        owner: op.name.clone(),
                        variable: param.variable.clone(),
                    });
                }
            }
            for category in LiteralCategory::ALL {
                if let Some(l) = op
                    .known_set(category)
                    .intersection(op.possible_set(category))
                    .next()
                {
                    return Err(ModelError::OverlappingSets {
                        operator: op.name.clone(),
                        literal: l.to_string(),
                    });
                }
            }
            let all_literals = op
                .pre
                .iter()
                .chain(&op.poss_pre)
                .chain(&op.add)
                .chain(&op.del)
                .chain(&op.poss_add)
                .chain(&op.poss_del);
            for lit in all_literals {
                let schema = self.predicate(&lit.predicate).ok_or_else(|| {
                    ModelError::UndeclaredPredicate {
                        operator: op.name.clone(),
                        predicate: lit.predicate.clone(),
                    }
                })?;
                if schema.arity() != lit.args.len() {
                    return Err(ModelError::ArityMismatch {
                        predicate: lit.predicate.clone(),
                        expected: schema.arity(),
                        found: lit.args.len(),
                    });
                }
                for v in &lit.args {
                    if !vars.contains(v) {
                        return Err(ModelError::UnboundVariable {
                            operator: op.name.clone(),
                            variable: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty name")]
    EmptyName,
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("duplicate operator `{0}`")]
    DuplicateOperator(String),
    #[error("duplicate parameter `{variable}` in `{owner}`")]
    DuplicateParameter { owner: String, variable: String },
    #[error(
        "literal `{literal}` appears in both known and possible sets of operator `{operator}`"
    )]
    OverlappingSets { operator: String, literal: String },
    #[error("operator `{operator}` uses undeclared predicate `{predicate}`")]
    UndeclaredPredicate { operator: String, predicate: String },
    #[error("predicate `{predicate}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("operator `{operator}` uses unbound variable `{variable}`")]
    UnboundVariable { operator: String, variable: String },
}

/// An object of the environment with its declared type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypedObject {
    pub name: String,
    pub type_name: String,
}

impl TypedObject {
    pub fn new(name: impl Into<String>, type_name: impl Into<String>) -> Self {
        TypedObject {
            name: name.into(),
            type_name: type_name.into(),
        }
    }
}

/// Name plus ordered object arguments identifying one ground action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSignature {
    pub name: String,
    pub args: Vec<String>,
}

impl ActionSignature {
    pub fn new(name: impl Into<String>, args: Vec<String>) -> Self {
        ActionSignature {
            name: name.into(),
            args,
        }
    }
}

impl fmt::Display for ActionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A goal hypothesis: a conjunction of ground facts.
pub type Hypothesis = BTreeSet<Fact>;

/// Canonical text of a hypothesis: `(and (on a b) (on b c))`.
pub fn hypothesis_text(goal: &Hypothesis) -> String {
    let mut out = String::from("(and");
    for f in goal {
        out.push(' ');
        out.push_str(&f.to_string());
    }
    out.push(')');
    out
}

/// Everything a recognizer needs: the incomplete domain, the environment,
/// the candidate goals (optionally with the benchmark's hidden goal), and
/// the observed action sequence.
#[derive(Debug, Clone)]
pub struct RecognitionProblem {
    pub domain: IncompleteDomain,
    pub objects: Vec<TypedObject>,
    pub init: BTreeSet<Fact>,
    pub hypotheses: Vec<Hypothesis>,
    /// Index into `hypotheses`; present in benchmark data, absent in live use.
    pub hidden_goal: Option<usize>,
    pub observations: Vec<ActionSignature>,
}
