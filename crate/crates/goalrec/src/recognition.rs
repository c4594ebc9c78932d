//! Online goal recognition: consume the observation sequence, mark achieved
//! landmarks, accumulate overlooked landmarks, and rank the candidate goals
//! with the goal-completion or uniqueness heuristic.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ground::{ActionId, FactId, GroundAction, GroundError, GroundedTask};
use crate::landmarks::{
    extract_landmarks_with_deadline, overlooked_from_candidates, LandmarkError, LandmarkSet,
    OverlookedExclusion,
};
use crate::model::{hypothesis_text, RecognitionProblem};
use crate::orpg::{replay_trace, ReplayWarning};
use crate::{Deadline, DeadlineExceeded};

/// Which landmark-based score ranks the hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Ratio of achieved to extracted landmarks.
    GoalCompletion,
    /// Ratio of achieved to extracted landmark uniqueness mass.
    Uniqueness,
}

impl Heuristic {
    pub fn tag(&self) -> &'static str {
        match self {
            Heuristic::GoalCompletion => "gc",
            Heuristic::Uniqueness => "uniq",
        }
    }
}

impl std::fmt::Display for Heuristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Landmarks already evidenced by the initial state or the processed
/// observations, split by the category they belong to. Each achieved set is
/// a subset of the corresponding landmark set and only ever grows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AchievementRecord {
    pub definite: BTreeSet<FactId>,
    pub possible: BTreeSet<FactId>,
    pub overlooked: BTreeSet<FactId>,
}

impl AchievementRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record seeded with the landmarks that already hold initially.
    pub fn from_init(landmarks: &LandmarkSet, init: &BTreeSet<FactId>) -> Self {
        let mut record = Self::new();
        record.absorb(landmarks, init.iter().copied());
        record
    }

    pub fn total(&self) -> usize {
        self.definite.len() + self.possible.len() + self.overlooked.len()
    }

    fn absorb(&mut self, landmarks: &LandmarkSet, facts: impl IntoIterator<Item = FactId>) {
        for f in facts {
            if landmarks.definite.contains(&f) {
                self.definite.insert(f);
            } else if landmarks.possible.contains(&f) {
                self.possible.insert(f);
            } else if landmarks.overlooked.contains(&f) {
                self.overlooked.insert(f);
            }
        }
    }
}

/// Marks the landmarks evidenced by one observation: a landmark is achieved
/// when it appears among the observation's known preconditions or its known
/// or possible add effects (and initially when it holds in `init`).
pub fn mark_achieved(
    record: &AchievementRecord,
    landmarks: &LandmarkSet,
    init: &BTreeSet<FactId>,
    observation: &GroundAction,
) -> AchievementRecord {
    let mut next = record.clone();
    next.absorb(landmarks, init.iter().copied());
    next.absorb(
        landmarks,
        observation
            .pre
            .iter()
            .chain(&observation.add)
            .chain(&observation.poss_add)
            .copied(),
    );
    next
}

/// Percentage of achieved landmarks over all landmarks; 0 when the landmark
/// set is empty.
pub fn goal_completion_score(landmarks: &LandmarkSet, achieved: &AchievementRecord) -> BigRational {
    let total = landmarks.total();
    if total == 0 {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(achieved.total()), BigInt::from(total))
}

/// Per-category landmark uniqueness: the inverse of how many hypotheses share
/// the landmark in that category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniquenessTable {
    definite: BTreeMap<FactId, BigRational>,
    possible: BTreeMap<FactId, BigRational>,
    overlooked: BTreeMap<FactId, BigRational>,
}

impl UniquenessTable {
    pub fn definite_value(&self, f: FactId) -> Option<&BigRational> {
        self.definite.get(&f)
    }

    pub fn possible_value(&self, f: FactId) -> Option<&BigRational> {
        self.possible.get(&f)
    }

    pub fn overlooked_value(&self, f: FactId) -> Option<&BigRational> {
        self.overlooked.get(&f)
    }

    /// A copy with every value multiplied by `factor`; the ranking produced
    /// by the uniqueness score is invariant under positive scaling.
    pub fn scaled(&self, factor: &BigRational) -> UniquenessTable {
        let scale = |m: &BTreeMap<FactId, BigRational>| {
            m.iter()
                .map(|(k, v)| (*k, v * factor))
                .collect::<BTreeMap<_, _>>()
        };
        UniquenessTable {
            definite: scale(&self.definite),
            possible: scale(&self.possible),
            overlooked: scale(&self.overlooked),
        }
    }
}

/// Builds the uniqueness table over the landmark sets of every hypothesis.
pub fn uniqueness_table(all_landmarks: &[LandmarkSet]) -> UniquenessTable {
    let mut def_counts: BTreeMap<FactId, u64> = BTreeMap::new();
    let mut pos_counts: BTreeMap<FactId, u64> = BTreeMap::new();
    let mut ovl_counts: BTreeMap<FactId, u64> = BTreeMap::new();
    for lm in all_landmarks {
        for &f in &lm.definite {
            *def_counts.entry(f).or_insert(0) += 1;
        }
        for &f in &lm.possible {
            *pos_counts.entry(f).or_insert(0) += 1;
        }
        for &f in &lm.overlooked {
            *ovl_counts.entry(f).or_insert(0) += 1;
        }
    }
    let invert = |counts: BTreeMap<FactId, u64>| {
        counts
            .into_iter()
            .map(|(f, n)| (f, BigRational::new(BigInt::one(), BigInt::from(n))))
            .collect::<BTreeMap<_, _>>()
    };
    UniquenessTable {
        definite: invert(def_counts),
        possible: invert(pos_counts),
        overlooked: invert(ovl_counts),
    }
}

/// Ratio between the uniqueness mass of the achieved landmarks and the
/// uniqueness mass of all landmarks of the hypothesis; 0 on an empty set.
pub fn uniqueness_score(
    landmarks: &LandmarkSet,
    achieved: &AchievementRecord,
    table: &UniquenessTable,
) -> BigRational {
    let sum = |facts: &BTreeSet<FactId>, values: &BTreeMap<FactId, BigRational>| {
        facts
            .iter()
            .filter_map(|f| values.get(f))
            .fold(BigRational::zero(), |acc, v| acc + v)
    };
    let denominator = sum(&landmarks.definite, &table.definite)
        + sum(&landmarks.possible, &table.possible)
        + sum(&landmarks.overlooked, &table.overlooked);
    if denominator.is_zero() {
        return BigRational::zero();
    }
    let numerator = sum(&achieved.definite, &table.definite)
        + sum(&achieved.possible, &table.possible)
        + sum(&achieved.overlooked, &table.overlooked);
    numerator / denominator
}

/// Outcome for one hypothesis after the full observation sequence.
#[derive(Debug, Clone)]
pub struct HypothesisResult {
    pub goal: BTreeSet<FactId>,
    pub goal_text: String,
    /// False when the goal was not optimistically reachable; such hypotheses
    /// carry an empty landmark set and score 0.
    pub reachable: bool,
    pub landmarks: LandmarkSet,
    pub achieved: AchievementRecord,
    pub score: BigRational,
}

impl HypothesisResult {
    pub fn score_f64(&self) -> f64 {
        self.score.to_f64().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct RecognitionResult {
    pub task: GroundedTask,
    /// One entry per hypothesis, in input order.
    pub hypotheses: Vec<HypothesisResult>,
    /// Indices of the hypotheses attaining the maximum score (ascending).
    pub top: Vec<usize>,
    pub duration: Duration,
    /// Observed actions whose known preconditions did not hold during the
    /// optimistic replay; their effects still count as evidence.
    pub warnings: Vec<ReplayWarning>,
}

impl RecognitionResult {
    /// Top hypothesis texts sorted lexicographically.
    pub fn top_texts(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .top
            .iter()
            .map(|&i| self.hypotheses[i].goal_text.clone())
            .collect();
        v.sort();
        v
    }

    /// Whether the hidden goal is among the returned goals.
    pub fn is_correct(&self, hidden_goal: usize) -> bool {
        self.top.contains(&hidden_goal)
    }

    pub fn spread(&self) -> usize {
        self.top.len()
    }
}

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error(transparent)]
    Ground(GroundError),
    #[error("observation `{0}` does not name a ground action of the task")]
    UnknownObservation(String),
    #[error("hypothesis fact `{0}` is outside the grounded fact universe")]
    UnknownGoalFact(String),
    #[error("recognition timed out")]
    Timeout,
}

impl From<DeadlineExceeded> for RecognizeError {
    fn from(_: DeadlineExceeded) -> Self {
        RecognizeError::Timeout
    }
}

impl From<GroundError> for RecognizeError {
    fn from(e: GroundError) -> Self {
        match e {
            GroundError::Timeout(_) => RecognizeError::Timeout,
            other => RecognizeError::Ground(other),
        }
    }
}

/// Knobs for a recognition run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RecognizeOptions {
    /// Wall-clock budget; exceeded budgets surface as
    /// [`RecognizeError::Timeout`].
    pub deadline: Option<Deadline>,
    pub overlooked: OverlookedExclusion,
}

/// Runs the full pipeline: ground, extract landmarks per hypothesis, consume
/// the observations in order while accumulating achieved and overlooked
/// landmarks, then score every hypothesis and return the argmax set.
pub fn recognize(
    problem: &RecognitionProblem,
    heuristic: Heuristic,
) -> Result<RecognitionResult, RecognizeError> {
    recognize_with(problem, heuristic, RecognizeOptions::default())
}

pub fn recognize_with(
    problem: &RecognitionProblem,
    heuristic: Heuristic,
    options: RecognizeOptions,
) -> Result<RecognitionResult, RecognizeError> {
    let started = Instant::now();
    let deadline = options.deadline;
    let task = crate::ground::ground_with_deadline(
        &problem.domain,
        &problem.objects,
        &problem.init,
        deadline,
    )?;

    let observations: Vec<ActionId> = problem
        .observations
        .iter()
        .map(|sig| {
            task.action_by_signature(sig)
                .ok_or_else(|| RecognizeError::UnknownObservation(sig.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let goals: Vec<BTreeSet<FactId>> = problem
        .hypotheses
        .iter()
        .map(|h| {
            h.iter()
                .map(|f| {
                    task.fact_id(f)
                        .ok_or_else(|| RecognizeError::UnknownGoalFact(f.to_string()))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;

    let mut landmark_sets: Vec<LandmarkSet> = Vec::with_capacity(goals.len());
    let mut reachable_flags: Vec<bool> = Vec::with_capacity(goals.len());
    for goal in &goals {
        match extract_landmarks_with_deadline(&task, goal, deadline) {
            Ok(lm) => {
                landmark_sets.push(lm);
                reachable_flags.push(true);
            }
            Err(LandmarkError::GoalUnreachable) => {
                landmark_sets.push(LandmarkSet::empty());
                reachable_flags.push(false);
            }
            Err(LandmarkError::Timeout(_)) => return Err(RecognizeError::Timeout),
        }
    }

    let mut achieved: Vec<AchievementRecord> = landmark_sets
        .iter()
        .map(|lm| AchievementRecord::from_init(lm, &task.init))
        .collect();

    let mut processed: Vec<ActionId> = Vec::with_capacity(observations.len());
    for &obs in &observations {
        if let Some(d) = deadline {
            d.check()?;
        }
        processed.push(obs);
        for (i, goal) in goals.iter().enumerate() {
            if !reachable_flags[i] {
                continue;
            }
            let new = overlooked_from_candidates(
                &task,
                goal,
                &processed,
                &processed[processed.len() - 1..],
                &landmark_sets[i],
                options.overlooked,
                deadline,
            )?;
            landmark_sets[i].overlooked.extend(new);
        }
        let action = task.action(obs).clone();
        for i in 0..goals.len() {
            achieved[i] = mark_achieved(&achieved[i], &landmark_sets[i], &task.init, &action);
        }
    }

    let table = match heuristic {
        Heuristic::Uniqueness => Some(uniqueness_table(&landmark_sets)),
        Heuristic::GoalCompletion => None,
    };

    let mut results: Vec<HypothesisResult> = Vec::with_capacity(goals.len());
    for (i, goal) in goals.iter().enumerate() {
        let score = match &table {
            Some(t) => uniqueness_score(&landmark_sets[i], &achieved[i], t),
            None => goal_completion_score(&landmark_sets[i], &achieved[i]),
        };
        results.push(HypothesisResult {
            goal: goal.clone(),
            goal_text: hypothesis_text(&problem.hypotheses[i]),
            reachable: reachable_flags[i],
            landmarks: std::mem::take(&mut landmark_sets[i]),
            achieved: std::mem::take(&mut achieved[i]),
            score,
        });
    }

    let top = argmax_indices(&results);
    let warnings = replay_trace(&task, &task.init, &observations).warnings;
    Ok(RecognitionResult {
        task,
        hypotheses: results,
        top,
        duration: started.elapsed(),
        warnings,
    })
}

/// Indices of every hypothesis attaining the exact maximum score.
fn argmax_indices(results: &[HypothesisResult]) -> Vec<usize> {
    let max = match results.iter().map(|r| &r.score).max() {
        Some(m) => m.clone(),
        None => return Vec::new(),
    };
    results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.score == max)
        .map(|(i, _)| i)
        .collect()
}

/// Serializable recognition report: everything but `duration_seconds` is a
/// deterministic function of the inputs.
#[derive(Debug, Clone, Serialize)]
pub struct RecognitionReport {
    pub heuristic: String,
    pub duration_seconds: f64,
    pub hypotheses: Vec<HypothesisReportEntry>,
    pub top: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReportEntry {
    pub goal: String,
    pub score: f64,
    pub top: bool,
    pub reachable: bool,
    pub landmarks: CategoryCounts,
    pub achieved: CategoryCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct CategoryCounts {
    pub definite: usize,
    pub possible: usize,
    pub overlooked: usize,
}

impl RecognitionReport {
    pub fn new(result: &RecognitionResult, heuristic: Heuristic) -> Self {
        let hypotheses = result
            .hypotheses
            .iter()
            .enumerate()
            .map(|(i, h)| HypothesisReportEntry {
                goal: h.goal_text.clone(),
                score: h.score_f64(),
                top: result.top.contains(&i),
                reachable: h.reachable,
                landmarks: CategoryCounts {
                    definite: h.landmarks.definite.len(),
                    possible: h.landmarks.possible.len(),
                    overlooked: h.landmarks.overlooked.len(),
                },
                achieved: CategoryCounts {
                    definite: h.achieved.definite.len(),
                    possible: h.achieved.possible.len(),
                    overlooked: h.achieved.overlooked.len(),
                },
            })
            .collect();
        RecognitionReport {
            heuristic: heuristic.tag().to_string(),
            duration_seconds: result.duration.as_secs_f64(),
            hypotheses,
            top: result.top_texts(),
        }
    }
}
