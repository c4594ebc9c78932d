//! Fact landmark extraction over the optimistic relaxed planning graph.
//!
//! Extraction back-chains from the goal: a confirmed landmark at level `l`
//! contributes the known preconditions of its level `l-1` achievers as new
//! candidates, and a candidate is confirmed either trivially (it is a goal or
//! initial-state fact) or by rebuilding the graph with the candidate's
//! achievers excluded and observing that the goal becomes unreachable.
//!
//! Confirmed landmarks split into *definite* (achievable through a known add
//! effect), *possible* (achievable only through possible add effects, or
//! justified only through possible-add achiever edges), and *overlooked*
//! (genuine landmarks the extractor missed, confirmed online by excluding
//! observed achievers).

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::ground::{ActionId, FactId, GroundedTask};
use crate::orpg::{build_orpg, Orpg};
use crate::{Deadline, DeadlineExceeded};

/// Per-goal landmark sets. The three sets are pairwise disjoint and the goal
/// facts always appear in `definite` or `possible`. `overlooked` starts empty
/// and grows as observations are processed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LandmarkSet {
    pub definite: BTreeSet<FactId>,
    pub possible: BTreeSet<FactId>,
    pub overlooked: BTreeSet<FactId>,
}

impl LandmarkSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn total(&self) -> usize {
        self.definite.len() + self.possible.len() + self.overlooked.len()
    }

    pub fn contains(&self, f: FactId) -> bool {
        self.definite.contains(&f) || self.possible.contains(&f) || self.overlooked.contains(&f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LandmarkError {
    #[error("goal is not optimistically reachable")]
    GoalUnreachable,
    #[error(transparent)]
    Timeout(#[from] DeadlineExceeded),
}

/// Extracts definite and possible landmarks for `goal`.
pub fn extract_landmarks(
    task: &GroundedTask,
    goal: &BTreeSet<FactId>,
) -> Result<LandmarkSet, LandmarkError> {
    extract_landmarks_with_deadline(task, goal, None)
}

pub fn extract_landmarks_with_deadline(
    task: &GroundedTask,
    goal: &BTreeSet<FactId>,
    deadline: Option<Deadline>,
) -> Result<LandmarkSet, LandmarkError> {
    let base = build_orpg(task, &task.init, &BTreeSet::new());
    if !base.reachable(goal) {
        return Err(LandmarkError::GoalUnreachable);
    }

    let mut confirmed: BTreeSet<FactId> = goal.clone();
    let mut rejected: BTreeSet<FactId> = BTreeSet::new();
    let mut queue: VecDeque<FactId> = goal.iter().copied().collect();

    while let Some(fact) = queue.pop_front() {
        if let Some(d) = deadline {
            d.check()?;
        }
        let achievers = base.first_level_achievers(task, fact);
        if achievers.is_empty() {
            continue;
        }
        // Candidate pool: every known precondition of every first-level
        // achiever. Verification filters the unsound ones.
        let mut pool: BTreeSet<FactId> = BTreeSet::new();
        for &a in &achievers {
            pool.extend(task.action(a).pre.iter().copied());
        }
        for candidate in pool {
            if confirmed.contains(&candidate) || rejected.contains(&candidate) {
                continue;
            }
            if let Some(d) = deadline {
                d.check()?;
            }
            if verify_candidate(task, goal, candidate) {
                confirmed.insert(candidate);
                queue.push_back(candidate);
            } else {
                rejected.insert(candidate);
            }
        }
    }

    Ok(classify(task, &base, &confirmed))
}

/// Splits confirmed landmarks into definite and possible.
///
/// A landmark with achievers is definite when at least one achiever provides
/// it through a known add effect, possible when every achiever provides it
/// only as a possible add. A landmark with no achievers (confirmed through
/// initial-state or goal membership) is possible exactly when some
/// back-chaining edge that justified it runs through a possible add effect.
fn classify(task: &GroundedTask, base: &Orpg, confirmed: &BTreeSet<FactId>) -> LandmarkSet {
    let mut set = LandmarkSet::empty();
    for &fact in confirmed {
        let producers = task.producers(fact);
        if !producers.is_empty() {
            if producers.iter().any(|&a| task.action(a).adds_known(fact)) {
                set.definite.insert(fact);
            } else {
                set.possible.insert(fact);
            }
            continue;
        }
        let mut any_possible_edge = false;
        'edges: for &justified in confirmed {
            for a in base.first_level_achievers(task, justified) {
                let action = task.action(a);
                if action.requires(fact) && !action.adds_known(justified) {
                    any_possible_edge = true;
                    break 'edges;
                }
            }
        }
        if any_possible_edge {
            set.possible.insert(fact);
        } else {
            set.definite.insert(fact);
        }
    }
    set
}

/// Shared known preconditions of a set of achievers: the intersection over
/// the achievers' known precondition sets (possible preconditions are never
/// required under the optimistic relaxation).
pub fn candidate_from_achievers(task: &GroundedTask, achievers: &[ActionId]) -> BTreeSet<FactId> {
    let mut iter = achievers.iter();
    let first = match iter.next() {
        Some(&a) => a,
        None => return BTreeSet::new(),
    };
    let mut shared: BTreeSet<FactId> = task.action(first).pre.iter().copied().collect();
    for &a in iter {
        let action = task.action(a);
        shared.retain(|&f| action.requires(f));
    }
    shared
}

/// Confirms a landmark candidate: goal and initial-state facts hold
/// trivially; anything else must sever the goal when its achievers are
/// excluded from a rebuilt graph.
pub fn verify_candidate(task: &GroundedTask, goal: &BTreeSet<FactId>, fact: FactId) -> bool {
    if goal.contains(&fact) || task.init.contains(&fact) {
        return true;
    }
    let excluded: BTreeSet<ActionId> = task.producers(fact).iter().copied().collect();
    !build_orpg(task, &task.init, &excluded).reachable(goal)
}

/// Which achievers to exclude when testing a potentially overlooked landmark.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OverlookedExclusion {
    /// Exclude only observed achievers of the candidate fact.
    #[default]
    ObservedOnly,
    /// Stricter variant: exclude every achiever of the candidate fact.
    AllAchievers,
}

/// Finds overlooked landmarks from the processed observation prefix: facts
/// achieved by observed actions, absent from the known sets, whose exclusion
/// (per `mode`) makes the goal unreachable. The result is disjoint from every
/// set in `known`.
pub fn extract_overlooked(
    task: &GroundedTask,
    goal: &BTreeSet<FactId>,
    observed: &[ActionId],
    known: &LandmarkSet,
    mode: OverlookedExclusion,
) -> BTreeSet<FactId> {
    overlooked_from_candidates(task, goal, observed, observed, known, mode, None)
        .expect("no deadline was set")
}

/// Overlooked extraction with the candidate pool limited to the add effects
/// of `candidate_actions`; the recognizer passes only the newest observation
/// since a candidate's verdict can change only when a new observed achiever
/// arrives.
pub(crate) fn overlooked_from_candidates(
    task: &GroundedTask,
    goal: &BTreeSet<FactId>,
    observed: &[ActionId],
    candidate_actions: &[ActionId],
    known: &LandmarkSet,
    mode: OverlookedExclusion,
    deadline: Option<Deadline>,
) -> Result<BTreeSet<FactId>, DeadlineExceeded> {
    let mut candidates: BTreeSet<FactId> = BTreeSet::new();
    for &o in candidate_actions {
        let a = task.action(o);
        candidates.extend(a.add.iter().chain(&a.poss_add).copied());
    }
    candidates.retain(|&f| !known.contains(f));

    let mut found = BTreeSet::new();
    for fact in candidates {
        if let Some(d) = deadline {
            d.check()?;
        }
        let excluded: BTreeSet<ActionId> = match mode {
            OverlookedExclusion::ObservedOnly => observed
                .iter()
                .copied()
                .filter(|&o| task.action(o).achieves(fact))
                .collect(),
            OverlookedExclusion::AllAchievers => task.producers(fact).iter().copied().collect(),
        };
        if excluded.is_empty() {
            continue;
        }
        if !build_orpg(task, &task.init, &excluded).reachable(goal) {
            found.insert(fact);
        }
    }
    Ok(found)
}
