//! Goal recognition over incomplete STRIPS domain models.
//!
//! The observer holds a domain whose operators are annotated with *possible*
//! preconditions and effects. This crate parses such annotated domains,
//! grounds them, builds optimistic relaxed planning graphs, extracts
//! definite/possible/overlooked fact landmarks per candidate goal, and ranks
//! the candidates online with two landmark-based heuristics. A dataset
//! generator degrades complete domains reproducibly and a benchmark harness
//! reports time, accuracy, spread, and ROC-space points over a corpus.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --example walkthrough
//! cargo run --example extract_landmarks
//! cargo run --example recognize_goal
//! cargo run --example degrade_domain
//! cargo run --example run_benchmark
//! ```

pub mod datagen;
pub mod eval;
pub mod ground;
pub mod landmarks;
pub mod model;
pub mod orpg;
pub mod parse;
pub mod recognition;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use datagen::{degrade, degrade_suite, DegradeSpec, DegradeVariant};
pub use ground::{count_completions, count_completions_grounded, ground, GroundedTask};
pub use landmarks::{
    candidate_from_achievers, extract_landmarks, extract_overlooked, verify_candidate, LandmarkSet,
    OverlookedExclusion,
};
pub use model::{Fact, IncompleteDomain, IncompleteOperator, RecognitionProblem};
pub use orpg::{apply_optimistic, build_orpg, replay_trace, Orpg};
pub use parse::{
    load_recognition_problem, parse_domain, parse_hypotheses, parse_observation_lines,
    parse_observations, parse_problem, serialize_domain,
};
pub use recognition::{recognize, recognize_with, Heuristic, RecognitionResult, RecognizeOptions};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("wall-clock deadline exceeded")]
pub struct DeadlineExceeded;

/// Wall-clock budget checked cooperatively inside the expensive loops.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    at: Instant,
}

impl Deadline {
    pub fn after(budget: Duration) -> Self {
        Deadline {
            at: Instant::now() + budget,
        }
    }

    pub fn check(&self) -> Result<(), DeadlineExceeded> {
        if Instant::now() >= self.at {
            Err(DeadlineExceeded)
        } else {
            Ok(())
        }
    }
}
