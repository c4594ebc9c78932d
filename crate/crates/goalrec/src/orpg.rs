//! Optimistic relaxed planning graph: delete-relaxed reachability under the
//! most-optimistic completion semantics, plus exact optimistic state
//! progression for replaying observation traces.
//!
//! An action fires when its known preconditions are present (possible
//! preconditions are never required); it contributes its known and possible
//! add effects to the next layer; known and possible delete effects are
//! ignored by the graph. Exact progression applies known deletes.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ground::{ActionId, FactId, GroundedTask};

/// First-appearance levels and exclusion mask of one graph build. The graph
/// is immutable; landmark verification rebuilds with a different exclusion
/// set instead of editing.
#[derive(Debug, Clone)]
pub struct Orpg {
    fact_level: Vec<Option<u32>>,
    action_level: Vec<Option<u32>>,
    excluded: Vec<bool>,
    max_level: u32,
}

impl Orpg {
    pub fn fact_level(&self, f: FactId) -> Option<u32> {
        self.fact_level[f.index()]
    }

    pub fn action_level(&self, a: ActionId) -> Option<u32> {
        self.action_level[a.index()]
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn is_excluded(&self, a: ActionId) -> bool {
        self.excluded[a.index()]
    }

    /// True iff every goal fact appears at some level.
    pub fn reachable<'a>(&self, goal: impl IntoIterator<Item = &'a FactId>) -> bool {
        goal.into_iter()
            .all(|f| self.fact_level[f.index()].is_some())
    }

    /// Every non-excluded action that can achieve `f` through a known or
    /// possible add effect, regardless of whether it fired.
    pub fn achievers(&self, task: &GroundedTask, f: FactId) -> Vec<ActionId> {
        task.producers(f)
            .iter()
            .copied()
            .filter(|a| !self.excluded[a.index()])
            .collect()
    }

    /// Achievers of `f` that fired at the level immediately before it; these
    /// are the actions back-chaining inspects.
    pub fn first_level_achievers(&self, task: &GroundedTask, f: FactId) -> Vec<ActionId> {
        match self.fact_level[f.index()] {
            None | Some(0) => Vec::new(),
            Some(level) => task
                .producers(f)
                .iter()
                .copied()
                .filter(|a| self.action_level[a.index()] == Some(level - 1))
                .collect(),
        }
    }
}

/// Builds the graph to fixpoint from `init`, never firing actions in
/// `excluded`.
pub fn build_orpg(
    task: &GroundedTask,
    init: &BTreeSet<FactId>,
    excluded: &BTreeSet<ActionId>,
) -> Orpg {
    let nf = task.num_facts();
    let na = task.num_actions();
    let mut fact_level: Vec<Option<u32>> = vec![None; nf];
    let mut action_level: Vec<Option<u32>> = vec![None; na];
    let mut excluded_mask = vec![false; na];
    for a in excluded {
        excluded_mask[a.index()] = true;
    }

    let mut remaining: Vec<u32> = task.actions.iter().map(|a| a.pre.len() as u32).collect();
    let mut to_fire: Vec<ActionId> = task
        .action_ids()
        .filter(|a| remaining[a.index()] == 0 && !excluded_mask[a.index()])
        .collect();

    let mut frontier: Vec<FactId> = Vec::new();
    for &f in init {
        if fact_level[f.index()].is_none() {
            fact_level[f.index()] = Some(0);
            frontier.push(f);
        }
    }

    let mut level = 0u32;
    let mut max_level = 0u32;
    loop {
        for &f in &frontier {
            for &a in task.consumers(f) {
                remaining[a.index()] -= 1;
                if remaining[a.index()] == 0 && !excluded_mask[a.index()] {
                    to_fire.push(a);
                }
            }
        }
        let mut next_frontier: Vec<FactId> = Vec::new();
        for &a in &to_fire {
            if action_level[a.index()].is_some() {
                continue;
            }
            action_level[a.index()] = Some(level);
            let action = task.action(a);
            for &g in action.add.iter().chain(&action.poss_add) {
                if fact_level[g.index()].is_none() {
                    fact_level[g.index()] = Some(level + 1);
                    next_frontier.push(g);
                }
            }
        }
        to_fire.clear();
        if next_frontier.is_empty() {
            break;
        }
        level += 1;
        max_level = level;
        frontier = next_frontier;
    }

    Orpg {
        fact_level,
        action_level,
        excluded: excluded_mask,
        max_level,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("action `{action}` is inapplicable: known precondition `{missing}` does not hold")]
pub struct InapplicableAction {
    pub action: String,
    pub missing: String,
}

/// Optimistic successor: requires the known preconditions, applies known
/// deletes, and accumulates known and possible adds (possible deletes never
/// fire).
pub fn apply_optimistic(
    task: &GroundedTask,
    state: &BTreeSet<FactId>,
    action: ActionId,
) -> Result<BTreeSet<FactId>, InapplicableAction> {
    let a = task.action(action);
    for f in &a.pre {
        if !state.contains(f) {
            return Err(InapplicableAction {
                action: a.signature.to_string(),
                missing: task.fact(*f).to_string(),
            });
        }
    }
    Ok(apply_effects(task, state, action))
}

/// Effect application without the applicability check.
pub fn apply_effects(
    task: &GroundedTask,
    state: &BTreeSet<FactId>,
    action: ActionId,
) -> BTreeSet<FactId> {
    let a = task.action(action);
    let mut next = state.clone();
    for f in &a.del {
        next.remove(f);
    }
    for f in a.add.iter().chain(&a.poss_add) {
        next.insert(*f);
    }
    next
}

/// A replayed observation whose known preconditions did not hold. The trace
/// may come from a completion the observer's model cannot confirm, so the
/// effects are still accumulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayWarning {
    pub step: usize,
    pub action: String,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TraceReplay {
    /// Visited states, starting with the initial state; `states.len()` is one
    /// more than the number of actions.
    pub states: Vec<BTreeSet<FactId>>,
    pub warnings: Vec<ReplayWarning>,
}

/// Replays an observation trace under optimistic progression.
pub fn replay_trace(
    task: &GroundedTask,
    init: &BTreeSet<FactId>,
    actions: &[ActionId],
) -> TraceReplay {
    let mut states = Vec::with_capacity(actions.len() + 1);
    let mut warnings = Vec::new();
    states.push(init.clone());
    for (step, &aid) in actions.iter().enumerate() {
        let state = states.last().unwrap();
        let a = task.action(aid);
        let missing: Vec<String> = a
            .pre
            .iter()
            .filter(|f| !state.contains(f))
            .map(|f| task.fact(*f).to_string())
            .collect();
        if !missing.is_empty() {
            warnings.push(ReplayWarning {
                step,
                action: a.signature.to_string(),
                missing,
            });
        }
        states.push(apply_effects(task, state, aid));
    }
    TraceReplay { states, warnings }
}
