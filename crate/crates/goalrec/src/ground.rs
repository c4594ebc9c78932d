//! Instantiation of lifted incomplete operators over typed objects, and
//! completion counting.
//!
//! Facts and actions are interned: the grounded task owns sorted tables and
//! the rest of the crate works with [`FactId`]/[`ActionId`] indices. No
//! reachability pruning happens here; landmark verification removes achievers
//! from the action set, so a statically pruned set could change reachability
//! answers.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use thiserror::Error;

use crate::model::{
    ActionSignature, Fact, IncompleteDomain, IncompleteOperator, Literal, TypedObject,
};
use crate::{Deadline, DeadlineExceeded};

/// Index into [`GroundedTask::facts`]; ids follow the lexicographic order of
/// the fact universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactId(pub u32);

impl FactId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into [`GroundedTask::actions`]; ids follow the lexicographic order
/// of action signatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One instantiated incomplete action. The six sets are sorted, deduplicated
/// id lists satisfying the same per-category disjointness as the lifted
/// operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub signature: ActionSignature,
    pub pre: Vec<FactId>,
    pub poss_pre: Vec<FactId>,
    pub add: Vec<FactId>,
    pub del: Vec<FactId>,
    pub poss_add: Vec<FactId>,
    pub poss_del: Vec<FactId>,
}

impl GroundAction {
    /// True when the action has `f` among its known add effects.
    pub fn adds_known(&self, f: FactId) -> bool {
        self.add.binary_search(&f).is_ok()
    }

    /// True when the action can produce `f` (known or possible add effect).
    pub fn achieves(&self, f: FactId) -> bool {
        self.add.binary_search(&f).is_ok() || self.poss_add.binary_search(&f).is_ok()
    }

    pub fn requires(&self, f: FactId) -> bool {
        self.pre.binary_search(&f).is_ok()
    }

    /// Number of literals in the three possible sets.
    pub fn possible_count(&self) -> usize {
        self.poss_pre.len() + self.poss_add.len() + self.poss_del.len()
    }
}

/// The grounded task: fact universe, incomplete ground actions, objects, and
/// initial state. Immutable after construction and safe to share.
#[derive(Debug, Clone)]
pub struct GroundedTask {
    facts: Vec<Fact>,
    fact_ids: HashMap<Fact, FactId>,
    pub actions: Vec<GroundAction>,
    signature_ids: HashMap<ActionSignature, ActionId>,
    pub objects: Vec<TypedObject>,
    pub init: BTreeSet<FactId>,
    producers: Vec<Vec<ActionId>>,
    consumers: Vec<Vec<ActionId>>,
}

impl GroundedTask {
    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn fact(&self, id: FactId) -> &Fact {
        &self.facts[id.index()]
    }

    pub fn fact_id(&self, fact: &Fact) -> Option<FactId> {
        self.fact_ids.get(fact).copied()
    }

    pub fn fact_ids(&self) -> impl Iterator<Item = FactId> {
        (0..self.facts.len() as u32).map(FactId)
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn action_by_signature(&self, sig: &ActionSignature) -> Option<ActionId> {
        self.signature_ids.get(sig).copied()
    }

    pub fn has_action_named(&self, name: &str) -> bool {
        self.actions.iter().any(|a| a.signature.name == name)
    }

    /// All actions with `f` among their known or possible add effects.
    pub fn producers(&self, f: FactId) -> &[ActionId] {
        &self.producers[f.index()]
    }

    /// All actions with `f` among their known preconditions.
    pub fn consumers(&self, f: FactId) -> &[ActionId] {
        &self.consumers[f.index()]
    }

    /// Resolves a set of facts to ids; fails on facts outside the universe.
    pub fn resolve_facts(&self, facts: &BTreeSet<Fact>) -> Result<BTreeSet<FactId>, GroundError> {
        facts
            .iter()
            .map(|f| {
                self.fact_id(f)
                    .ok_or_else(|| GroundError::UnknownFact(f.to_string()))
            })
            .collect()
    }

    /// Renders a set of fact ids as sorted display strings.
    pub fn render_facts<'a>(&'a self, ids: impl IntoIterator<Item = &'a FactId>) -> Vec<String> {
        let mut v: Vec<String> = ids.into_iter().map(|f| self.fact(*f).to_string()).collect();
        v.sort();
        v
    }
}

#[derive(Debug, Error)]
pub enum GroundError {
    #[error("initial-state fact `{0}` is not in the grounded fact universe")]
    UnknownInitFact(String),
    #[error("fact `{0}` is not in the grounded fact universe")]
    UnknownFact(String),
    #[error("object `{name}` has undeclared type `{type_name}`")]
    UnknownObjectType { name: String, type_name: String },
    #[error(transparent)]
    Timeout(#[from] DeadlineExceeded),
}

/// Grounds the domain over the objects: the fact universe is every
/// type-consistent instantiation of every predicate and the action set is
/// every type-consistent binding of every operator, both in lexicographic
/// order.
pub fn ground(
    domain: &IncompleteDomain,
    objects: &[TypedObject],
    init: &BTreeSet<Fact>,
) -> Result<GroundedTask, GroundError> {
    ground_with_deadline(domain, objects, init, None)
}

pub fn ground_with_deadline(
    domain: &IncompleteDomain,
    objects: &[TypedObject],
    init: &BTreeSet<Fact>,
    deadline: Option<Deadline>,
) -> Result<GroundedTask, GroundError> {
    for o in objects {
        if !domain.types.contains(&o.type_name) {
            return Err(GroundError::UnknownObjectType {
                name: o.name.clone(),
                type_name: o.type_name.clone(),
            });
        }
    }

    // Candidate objects per type, computed once per distinct type name.
    let mut by_type: HashMap<String, Vec<String>> = HashMap::new();
    let candidates_for = |type_name: &str, by_type: &mut HashMap<String, Vec<String>>| {
        if let Some(v) = by_type.get(type_name) {
            return v.clone();
        }
        let mut v: Vec<String> = objects
            .iter()
            .filter(|o| domain.types.is_subtype(&o.type_name, type_name))
            .map(|o| o.name.clone())
            .collect();
        v.sort();
        by_type.insert(type_name.to_string(), v.clone());
        v
    };

    // Fact universe.
    let mut fact_set: BTreeSet<Fact> = BTreeSet::new();
    for p in &domain.predicates {
        let slots: Vec<Vec<String>> = p
            .parameters
            .iter()
            .map(|param| candidates_for(&param.type_name, &mut by_type))
            .collect();
        enumerate_tuples(&slots, &mut |args| {
            fact_set.insert(Fact::new(p.name.clone(), args.to_vec()));
            Ok(())
        })?;
    }
    let facts: Vec<Fact> = fact_set.into_iter().collect();
    let fact_ids: HashMap<Fact, FactId> = facts
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), FactId(i as u32)))
        .collect();

    // Ground actions.
    let mut actions: Vec<GroundAction> = Vec::new();
    let mut counter = 0usize;
    for op in &domain.operators {
        let slots: Vec<Vec<String>> = op
            .parameters
            .iter()
            .map(|param| candidates_for(&param.type_name, &mut by_type))
            .collect();
        enumerate_tuples(&slots, &mut |args| {
            counter += 1;
            if counter.is_multiple_of(1024) {
                if let Some(d) = deadline {
                    d.check()?;
                }
            }
            actions.push(instantiate(op, args, &fact_ids));
            Ok(())
        })?;
    }
    actions.sort_by(|a, b| a.signature.cmp(&b.signature));

    let signature_ids: HashMap<ActionSignature, ActionId> = actions
        .iter()
        .enumerate()
        .map(|(i, a)| (a.signature.clone(), ActionId(i as u32)))
        .collect();

    let init_ids: BTreeSet<FactId> = init
        .iter()
        .map(|f| {
            fact_ids
                .get(f)
                .copied()
                .ok_or_else(|| GroundError::UnknownInitFact(f.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let mut producers: Vec<Vec<ActionId>> = vec![Vec::new(); facts.len()];
    let mut consumers: Vec<Vec<ActionId>> = vec![Vec::new(); facts.len()];
    for (i, a) in actions.iter().enumerate() {
        let id = ActionId(i as u32);
        for &f in a.add.iter().chain(&a.poss_add) {
            producers[f.index()].push(id);
        }
        for &f in &a.pre {
            consumers[f.index()].push(id);
        }
    }

    Ok(GroundedTask {
        facts,
        fact_ids,
        actions,
        signature_ids,
        objects: objects.to_vec(),
        init: init_ids,
        producers,
        consumers,
    })
}

/// Calls `emit` with every tuple from the cartesian product of `slots`.
fn enumerate_tuples(
    slots: &[Vec<String>],
    emit: &mut dyn FnMut(&[String]) -> Result<(), GroundError>,
) -> Result<(), GroundError> {
    if slots.iter().any(|s| s.is_empty()) && !slots.is_empty() {
        return Ok(());
    }
    let mut tuple: Vec<String> = slots.iter().map(|s| s[0].clone()).collect();
    if slots.is_empty() {
        return emit(&tuple);
    }
    let mut odometer = vec![0usize; slots.len()];
    loop {
        for (i, &d) in odometer.iter().enumerate() {
            tuple[i] = slots[i][d].clone();
        }
        emit(&tuple)?;
        let mut i = slots.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            odometer[i] += 1;
            if odometer[i] < slots[i].len() {
                break;
            }
            odometer[i] = 0;
        }
    }
}

fn instantiate(
    op: &IncompleteOperator,
    args: &[String],
    fact_ids: &HashMap<Fact, FactId>,
) -> GroundAction {
    let binding: HashMap<&str, &str> = op
        .parameters
        .iter()
        .zip(args)
        .map(|(p, a)| (p.variable.as_str(), a.as_str()))
        .collect();
    let subst = |set: &BTreeSet<Literal>| -> Vec<FactId> {
        let mut v: Vec<FactId> = set
            .iter()
            .map(|lit| {
                let fact = Fact::new(
                    lit.predicate.clone(),
                    lit.args
                        .iter()
                        .map(|v| binding[v.as_str()].to_string())
                        .collect(),
                );
                fact_ids[&fact]
            })
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let pre = subst(&op.pre);
    let mut poss_pre = subst(&op.poss_pre);
    let add = subst(&op.add);
    let mut poss_add = subst(&op.poss_add);
    let del = subst(&op.del);
    let mut poss_del = subst(&op.poss_del);
    // A ground literal reachable from both a known and a possible slot of the
    // same action keeps only the known slot, preserving disjointness.
    poss_pre.retain(|f| pre.binary_search(f).is_err());
    poss_add.retain(|f| add.binary_search(f).is_err());
    poss_del.retain(|f| del.binary_search(f).is_err());

    GroundAction {
        signature: ActionSignature::new(op.name.clone(), args.to_vec()),
        pre,
        poss_pre,
        add,
        del,
        poss_add,
        poss_del,
    }
}

/// Incompleteness measure: `completions = 2^k` where `k` sums the possible
/// set sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionCount {
    pub k: u64,
    pub completions: BigUint,
}

impl CompletionCount {
    fn from_k(k: u64) -> Self {
        CompletionCount {
            k,
            completions: BigUint::from(1u8) << k,
        }
    }
}

/// Counts completions over the lifted operator set (the default measure).
pub fn count_completions(domain: &IncompleteDomain) -> CompletionCount {
    CompletionCount::from_k(
        domain
            .operators
            .iter()
            .map(|o| o.possible_count() as u64)
            .sum(),
    )
}

/// Counts completions over the grounded action set.
pub fn count_completions_grounded(task: &GroundedTask) -> CompletionCount {
    CompletionCount::from_k(task.actions.iter().map(|a| a.possible_count() as u64).sum())
}
