//! Shared oracles and generators for the integration suites.
//!
//! The oracles here are deliberately independent of the library's leveled
//! counter-based graph: reachability is decided by explicit state-space
//! search or naive saturation, and landmark status by the remove-the-fact
//! test, so agreement is meaningful.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use goalrec::ground::{ActionId, FactId, GroundedTask};
use goalrec::model::{
    ActionSignature, Fact, IncompleteDomain, IncompleteOperator, Literal, PredicateSchema, TypeTree,
};

// ---------------------------------------------------------------------------
// Reachability oracles
// ---------------------------------------------------------------------------

/// Exhaustive breadth-first search over optimistic delete-relaxed executions:
/// an action whose known preconditions hold may fire, growing the state by
/// its known and possible adds. Returns every distinct state visited.
pub fn search_states(
    task: &GroundedTask,
    init: &BTreeSet<FactId>,
    excluded: &BTreeSet<ActionId>,
) -> Vec<BTreeSet<FactId>> {
    let mut seen: HashSet<BTreeSet<FactId>> = HashSet::new();
    let mut queue: VecDeque<BTreeSet<FactId>> = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init.clone());
    while let Some(state) = queue.pop_front() {
        for a in task.action_ids() {
            if excluded.contains(&a) {
                continue;
            }
            let action = task.action(a);
            if !action.pre.iter().all(|f| state.contains(f)) {
                continue;
            }
            let mut next = state.clone();
            next.extend(action.add.iter().copied());
            next.extend(action.poss_add.iter().copied());
            if !seen.contains(&next) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// Goal reachability by exhaustive forward search.
pub fn search_reachable(
    task: &GroundedTask,
    init: &BTreeSet<FactId>,
    excluded: &BTreeSet<ActionId>,
    goal: &BTreeSet<FactId>,
) -> bool {
    search_states(task, init, excluded)
        .iter()
        .any(|s| goal.iter().all(|f| s.contains(f)))
}

/// Naive saturation of the delete-relaxed optimistic semantics: repeatedly
/// scan all actions until no new fact appears.
pub fn relaxed_closure(
    task: &GroundedTask,
    init: &BTreeSet<FactId>,
    excluded: &BTreeSet<ActionId>,
) -> BTreeSet<FactId> {
    let mut facts = init.clone();
    loop {
        let mut grew = false;
        for a in task.action_ids() {
            if excluded.contains(&a) {
                continue;
            }
            let action = task.action(a);
            if !action.pre.iter().all(|f| facts.contains(f)) {
                continue;
            }
            for &f in action.add.iter().chain(&action.poss_add) {
                grew |= facts.insert(f);
            }
        }
        if !grew {
            return facts;
        }
    }
}

/// Landmark oracle: `fact` is a fact landmark for `goal` exactly when the
/// goal cannot be reached while `fact` never holds, i.e. with `fact` removed
/// from the initial state and every achiever of `fact` excluded.
pub fn fact_landmark_oracle(task: &GroundedTask, goal: &BTreeSet<FactId>, fact: FactId) -> bool {
    let mut init = task.init.clone();
    init.remove(&fact);
    let excluded: BTreeSet<ActionId> = task.producers(fact).iter().copied().collect();
    let closure = relaxed_closure(task, &init, &excluded);
    !goal.iter().all(|f| closure.contains(f))
}

// ---------------------------------------------------------------------------
// Random propositional tasks
// ---------------------------------------------------------------------------

fn atom(i: usize) -> Literal {
    Literal::new(format!("f{i}"), vec![])
}

fn fact(i: usize) -> Fact {
    Fact::atom(format!("f{i}"))
}

fn propositional_domain(
    name: &str,
    nf: usize,
    operators: Vec<IncompleteOperator>,
) -> IncompleteDomain {
    let domain = IncompleteDomain {
        name: name.into(),
        types: TypeTree::new(),
        predicates: (0..nf)
            .map(|i| PredicateSchema {
                name: format!("f{i}"),
                parameters: vec![],
            })
            .collect(),
        operators,
    };
    domain.validate().expect("generated domain is valid");
    domain
}

fn random_subset(rng: &mut ChaCha8Rng, universe: usize, max_len: usize) -> BTreeSet<Literal> {
    let len = rng.gen_range(0..=max_len.min(universe));
    let mut out = BTreeSet::new();
    for _ in 0..len {
        out.insert(atom(rng.gen_range(0..universe)));
    }
    out
}

/// Arbitrary small incomplete propositional task for cross-checking
/// reachability: up to 12 facts and 8 actions, random known/possible sets.
pub fn random_propositional_task(seed: u64) -> (IncompleteDomain, BTreeSet<Fact>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = rng.gen_range(4..=12);
    let na = rng.gen_range(1..=8);
    let mut operators = Vec::new();
    for i in 0..na {
        let pre = random_subset(&mut rng, nf, 3);
        let add = random_subset(&mut rng, nf, 2);
        let mut poss_add = random_subset(&mut rng, nf, 2);
        let del = random_subset(&mut rng, nf, 2);
        let mut poss_del = random_subset(&mut rng, nf, 2);
        let mut poss_pre = random_subset(&mut rng, nf, 2);
        poss_pre.retain(|l| !pre.contains(l));
        poss_add.retain(|l| !add.contains(l));
        poss_del.retain(|l| !del.contains(l));
        operators.push(IncompleteOperator {
            name: format!("op{i}"),
            parameters: vec![],
            pre,
            poss_pre,
            add,
            del,
            poss_add,
            poss_del,
        });
    }
    let domain = propositional_domain("randprop", nf, operators);
    let mut init: BTreeSet<Fact> = BTreeSet::new();
    let ninit = rng.gen_range(1..=nf.min(4));
    while init.len() < ninit {
        init.insert(fact(rng.gen_range(0..nf)));
    }
    (domain, init)
}

/// Complete propositional task in which every fact has at most one achiever,
/// with a reachable goal. On this family the back-chaining extractor finds
/// exactly the facts accepted by [`fact_landmark_oracle`].
pub fn unique_achiever_task(seed: u64) -> (IncompleteDomain, BTreeSet<Fact>, BTreeSet<Fact>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = rng.gen_range(8..=48);
    let ninit = rng.gen_range(1..=4.min(nf - 1));
    let mut operators = Vec::new();
    for i in ninit..nf {
        // One producing action per non-initial fact; preconditions draw only
        // from strictly earlier facts so everything stays reachable.
        let mut pre = BTreeSet::new();
        let npre = rng.gen_range(1..=3.min(i));
        while pre.len() < npre {
            pre.insert(atom(rng.gen_range(0..i)));
        }
        let mut add = BTreeSet::new();
        add.insert(atom(i));
        let mut del = random_subset(&mut rng, i, 1);
        del.retain(|l| !add.contains(l));
        operators.push(IncompleteOperator {
            name: format!("make-f{i}"),
            parameters: vec![],
            pre,
            add,
            del,
            ..Default::default()
        });
    }
    let domain = propositional_domain("chain", nf, operators);
    let init: BTreeSet<Fact> = (0..ninit).map(fact).collect();
    let mut goal: BTreeSet<Fact> = BTreeSet::new();
    let ngoal = rng.gen_range(1..=2);
    while goal.len() < ngoal {
        goal.insert(fact(rng.gen_range(nf / 2..nf)));
    }
    (domain, init, goal)
}

// ---------------------------------------------------------------------------
// Strict classical STRIPS validator (token level, parser-independent)
// ---------------------------------------------------------------------------

/// Accepts only the plain STRIPS surface: no `:poss-` blocks anywhere, only
/// the classical sections, balanced parentheses.
pub fn strict_strips_validate(text: &str) -> bool {
    let mut depth: i64 = 0;
    for line in text.lines() {
        let line = line.split(';').next().unwrap_or("");
        if line.contains(":poss-") {
            return false;
        }
        for c in line.chars() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
    }
    if depth != 0 {
        return false;
    }
    let allowed = [
        ":requirements",
        ":strips",
        ":typing",
        ":types",
        ":predicates",
        ":action",
        ":parameters",
        ":precondition",
        ":effect",
        ":domain",
        ":objects",
        ":init",
        ":goal",
    ];
    for token in text.split_whitespace() {
        let token = token.trim_matches(|c| c == '(' || c == ')');
        if token.starts_with(':') && !allowed.contains(&token) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Blocksworld corpus generation
// ---------------------------------------------------------------------------

pub const BLOCKSWORLD_DOMAIN: &str = "\
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (holding ?x) (handempty))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
";

/// One benchmark instance: initial towers, candidate goal chains, and the
/// index of the hidden goal.
#[derive(Debug, Clone)]
pub struct BlocksInstance {
    pub blocks: Vec<String>,
    /// Initial configuration, each tower listed bottom to top.
    pub towers: Vec<Vec<String>>,
    /// Candidate goals, each a chain listed bottom to top.
    pub chains: Vec<Vec<String>>,
    pub hidden: usize,
}

impl BlocksInstance {
    pub fn init_facts(&self) -> BTreeSet<Fact> {
        let mut init = BTreeSet::new();
        init.insert(Fact::atom("handempty"));
        for tower in &self.towers {
            init.insert(Fact::new("ontable", vec![tower[0].clone()]));
            for pair in tower.windows(2) {
                init.insert(Fact::new("on", vec![pair[1].clone(), pair[0].clone()]));
            }
            init.insert(Fact::new("clear", vec![tower.last().unwrap().clone()]));
        }
        init
    }

    pub fn goal_facts(chain: &[String]) -> BTreeSet<Fact> {
        chain
            .windows(2)
            .map(|pair| Fact::new("on", vec![pair[1].clone(), pair[0].clone()]))
            .collect()
    }

    /// A valid complete-domain plan for the hidden goal: unstack everything
    /// onto the table, then assemble the goal chain bottom-up.
    pub fn plan(&self) -> Vec<ActionSignature> {
        let mut plan = Vec::new();
        for tower in &self.towers {
            for i in (1..tower.len()).rev() {
                plan.push(ActionSignature::new(
                    "unstack",
                    vec![tower[i].clone(), tower[i - 1].clone()],
                ));
                plan.push(ActionSignature::new("put-down", vec![tower[i].clone()]));
            }
        }
        let chain = &self.chains[self.hidden];
        for pair in chain.windows(2) {
            plan.push(ActionSignature::new("pick-up", vec![pair[1].clone()]));
            plan.push(ActionSignature::new(
                "stack",
                vec![pair[1].clone(), pair[0].clone()],
            ));
        }
        plan
    }

    pub fn problem_text(&self, name: &str) -> String {
        let mut out = format!("(define (problem {name})\n  (:domain blocksworld)\n  (:objects");
        for b in &self.blocks {
            out.push(' ');
            out.push_str(b);
        }
        out.push_str(")\n  (:init");
        for f in self.init_facts() {
            out.push(' ');
            out.push_str(&f.to_string());
        }
        out.push_str(")\n  (:goal (and");
        for f in Self::goal_facts(&self.chains[self.hidden]) {
            out.push(' ');
            out.push_str(&f.to_string());
        }
        out.push_str(")))\n");
        out
    }

    pub fn hypotheses_text(&self) -> String {
        let mut out = String::new();
        for chain in &self.chains {
            out.push_str(&goalrec::parse::goal_line(&Self::goal_facts(chain)));
            out.push('\n');
        }
        out
    }

    pub fn real_goal_text(&self) -> String {
        goalrec::parse::goal_line(&Self::goal_facts(&self.chains[self.hidden])) + "\n"
    }
}

/// Generates a random instance with `n_blocks` blocks and `n_hyps` candidate
/// chains. Every decoy chain contains at least one `on` atom that neither
/// holds initially nor belongs to the hidden goal, so a full observation
/// sequence never completes a decoy.
pub fn gen_blocks_instance(rng: &mut ChaCha8Rng, n_blocks: usize, n_hyps: usize) -> BlocksInstance {
    let blocks: Vec<String> = (0..n_blocks)
        .map(|i| {
            if n_blocks <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("b{i}")
            }
        })
        .collect();

    let mut shuffled = blocks.clone();
    shuffled.shuffle(rng);
    let mut towers: Vec<Vec<String>> = Vec::new();
    let mut rest = shuffled.as_slice();
    while !rest.is_empty() {
        let take = rng.gen_range(1..=rest.len().min(4));
        towers.push(rest[..take].to_vec());
        rest = &rest[take..];
    }

    let chain_len = 3.min(n_blocks);
    let random_chain = |rng: &mut ChaCha8Rng| -> Vec<String> {
        let mut pool = blocks.clone();
        pool.shuffle(rng);
        pool.truncate(chain_len);
        pool
    };

    let hidden_chain = random_chain(rng);
    let init_facts: BTreeSet<Fact> = {
        let inst = BlocksInstance {
            blocks: blocks.clone(),
            towers: towers.clone(),
            chains: vec![hidden_chain.clone()],
            hidden: 0,
        };
        inst.init_facts()
    };
    let hidden_goal = BlocksInstance::goal_facts(&hidden_chain);

    let mut chains = vec![hidden_chain];
    let mut attempts = 0;
    while chains.len() < n_hyps && attempts < 1000 {
        attempts += 1;
        let candidate = random_chain(rng);
        let goal = BlocksInstance::goal_facts(&candidate);
        if chains.iter().any(|c| BlocksInstance::goal_facts(c) == goal) {
            continue;
        }
        let has_fresh_atom = goal
            .iter()
            .any(|f| !init_facts.contains(f) && !hidden_goal.contains(f));
        if !has_fresh_atom {
            continue;
        }
        chains.push(candidate);
    }
    let hidden = rng.gen_range(0..chains.len());
    chains.swap(0, hidden);
    BlocksInstance {
        blocks,
        towers,
        chains,
        hidden,
    }
}

/// Order-preserving random sample of `percent`% of the plan (at least one
/// action).
pub fn sample_observations(
    rng: &mut ChaCha8Rng,
    plan: &[ActionSignature],
    percent: u32,
) -> Vec<ActionSignature> {
    let keep = ((plan.len() as u64 * percent as u64).div_ceil(100) as usize).clamp(1, plan.len());
    let mut indices: Vec<usize> = (0..plan.len()).collect();
    indices.shuffle(rng);
    indices.truncate(keep);
    indices.sort_unstable();
    indices.into_iter().map(|i| plan[i].clone()).collect()
}

pub fn observations_text(observations: &[ActionSignature]) -> String {
    observations.iter().map(|o| o.to_string() + "\n").collect()
}
