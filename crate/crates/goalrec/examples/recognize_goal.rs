//! Online goal recognition on an annotated blocksworld: both heuristics over
//! a partially observed plan, including an overlooked landmark picked up
//! from the observations.
//!
//! ```bash
//! cargo run --example recognize_goal
//! ```

use goalrec::parse::load_recognition_problem;
use goalrec::recognition::{recognize, Heuristic};

const DOMAIN: &str = "\
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (holding ?x) (handempty))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x))
    :poss-precondition (and (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)))
    :poss-effect-add (and (holding ?x)))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y)))
    :poss-effect-add (and (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
";

const PROBLEM: &str = "\
(define (problem sort-three)
  (:domain blocksworld)
  (:objects a b c)
  (:init (ontable a) (on b a) (clear b) (ontable c) (clear c) (handempty))
  (:goal (and (on a b))))
";

const HYPOTHESES: &str = "\
(and (on a b))
(and (on a c))
(and (on c b))
(and (on b c))
";

const REAL_GOAL: &str = "(and (on a b))\n";

// The observed agent unstacks b, then builds a on b.
const OBSERVATIONS: &str = "\
(unstack b a)
(put-down b)
(pick-up a)
(stack a b)
";

fn main() -> anyhow::Result<()> {
    let problem = load_recognition_problem(
        DOMAIN,
        PROBLEM,
        HYPOTHESES,
        Some(REAL_GOAL),
        Some(OBSERVATIONS),
    )?;
    let hidden = problem.hidden_goal.unwrap();
    println!(
        "{} candidate goals, hidden goal {}, {} observations\n",
        problem.hypotheses.len(),
        goalrec::model::hypothesis_text(&problem.hypotheses[hidden]),
        problem.observations.len()
    );

    for heuristic in [Heuristic::GoalCompletion, Heuristic::Uniqueness] {
        let result = recognize(&problem, heuristic)?;
        println!("heuristic {heuristic}:");
        for (i, h) in result.hypotheses.iter().enumerate() {
            println!(
                "  {} score {:.3} (landmarks {}+{}+{}, achieved {}){}",
                h.goal_text,
                h.score_f64(),
                h.landmarks.definite.len(),
                h.landmarks.possible.len(),
                h.landmarks.overlooked.len(),
                h.achieved.total(),
                if result.top.contains(&i) {
                    "  <- returned"
                } else {
                    ""
                },
            );
        }
        println!(
            "  correct: {} (spread {}, {:.1} ms)\n",
            result.is_correct(hidden),
            result.spread(),
            result.duration.as_secs_f64() * 1e3
        );
    }
    Ok(())
}
