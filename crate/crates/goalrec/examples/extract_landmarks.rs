//! Landmark extraction on an annotated blocksworld: how the definite and
//! possible sets shift as the domain loses information.
//!
//! ```bash
//! cargo run --example extract_landmarks
//! ```

use goalrec::ground::ground;
use goalrec::landmarks::extract_landmarks;
use goalrec::parse::{parse_domain, parse_hypotheses, parse_problem};
use goalrec::{degrade, DegradeSpec, DegradeVariant};

const BLOCKSWORLD: &str = "\
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

const PROBLEM: &str = "\
(define (problem tower)
  (:domain blocksworld)
  (:objects a b c d)
  (:init (ontable a) (on b a) (clear b) (ontable c) (on d c) (clear d) (handempty))
  (:goal (and (on a b))))
";

const HYPOTHESES: &str = "\
(and (on a b) (on b c))
(and (on c d))
(and (on d a) (on a c))
";

fn main() -> anyhow::Result<()> {
    let complete = parse_domain(BLOCKSWORLD)?;
    for percent in [0u32, 40, 80] {
        let domain = if percent == 0 {
            complete.clone()
        } else {
            degrade(
                &complete,
                &DegradeSpec {
                    percent,
                    seed: 7,
                    variant: DegradeVariant::S1,
                },
            )?
        };
        let problem = parse_problem(&domain, PROBLEM)?;
        let hypotheses = parse_hypotheses(&domain, &problem.objects, HYPOTHESES)?;
        let task = ground(&domain, &problem.objects, &problem.init)?;

        println!("== incompleteness {percent}% ==");
        for hyp in &hypotheses {
            let goal = task.resolve_facts(hyp)?;
            match extract_landmarks(&task, &goal) {
                Ok(lm) => {
                    println!("  goal {}", goalrec::parse::goal_line(hyp));
                    println!("    definite: {:?}", task.render_facts(lm.definite.iter()));
                    println!("    possible: {:?}", task.render_facts(lm.possible.iter()));
                }
                Err(e) => println!("  goal {}: {e}", goalrec::parse::goal_line(hyp)),
            }
        }
    }
    Ok(())
}
