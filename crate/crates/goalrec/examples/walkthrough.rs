//! End-to-end tour on a three-action propositional domain: parse an
//! annotated domain, ground it, inspect the optimistic graph, extract
//! landmarks, replay a trace, and recognize the goal.
//!
//! ```bash
//! cargo run --example walkthrough
//! ```

use std::collections::BTreeSet;

use goalrec::ground::{count_completions, ground};
use goalrec::landmarks::extract_landmarks;
use goalrec::orpg::{build_orpg, replay_trace};
use goalrec::parse::{load_recognition_problem, parse_domain, parse_problem};
use goalrec::recognition::{recognize, Heuristic};

const DOMAIN: &str = "\
(define (domain abstract)
  (:predicates (p) (q) (r) (g))
  (:action a
    :parameters ()
    :precondition (and (p) (q))
    :poss-precondition (and (r))
    :poss-effect-add (and (r))
    :poss-effect-del (and (p)))
  (:action b
    :parameters ()
    :precondition (and (p))
    :effect (and (r) (not (p)))
    :poss-effect-del (and (q)))
  (:action c
    :parameters ()
    :precondition (and (r))
    :poss-precondition (and (q))
    :effect (and (g))))
";

const PROBLEM: &str = "\
(define (problem abstract-1)
  (:domain abstract)
  (:init (p) (q))
  (:goal (and (g))))
";

fn main() -> anyhow::Result<()> {
    let domain = parse_domain(DOMAIN)?;
    let problem = parse_problem(&domain, PROBLEM)?;
    println!(
        "domain `{}`: {} operators",
        domain.name,
        domain.operators.len()
    );

    let completions = count_completions(&domain);
    println!(
        "incompleteness: k = {}, completions = {}",
        completions.k, completions.completions
    );

    let task = ground(&domain, &problem.objects, &problem.init)?;
    println!(
        "grounded: {} facts, {} actions",
        task.num_facts(),
        task.num_actions()
    );

    let graph = build_orpg(&task, &task.init, &BTreeSet::new());
    println!(
        "\noptimistic graph levels (fixpoint at level {}):",
        graph.max_level()
    );
    for f in task.fact_ids() {
        match graph.fact_level(f) {
            Some(l) => println!("  level {l}: {}", task.fact(f)),
            None => println!("  unreachable: {}", task.fact(f)),
        }
    }

    let goal = task.resolve_facts(&problem.goal)?;
    let lm = extract_landmarks(&task, &goal)?;
    println!(
        "\nlandmarks for {}:",
        goalrec::parse::goal_line(&problem.goal)
    );
    for f in task.render_facts(lm.definite.iter()) {
        println!("  definite {f}");
    }
    for f in task.render_facts(lm.possible.iter()) {
        println!("  possible {f}");
    }

    // The same extraction over the classical projection misses q: without
    // possible add effects, action a never counts as an achiever of r.
    let classical = domain.stripped();
    let ctask = ground(&classical, &problem.objects, &problem.init)?;
    let clm = extract_landmarks(&ctask, &ctask.resolve_facts(&problem.goal)?)?;
    println!(
        "classical projection landmarks: {:?}",
        ctask.render_facts(clm.definite.iter())
    );

    let trace: Vec<_> = ["a", "b", "c"]
        .iter()
        .map(|n| {
            task.action_by_signature(&goalrec::model::ActionSignature::new(*n, vec![]))
                .unwrap()
        })
        .collect();
    println!("\noptimistic replay of (a) (b) (c):");
    for (i, state) in replay_trace(&task, &task.init, &trace)
        .states
        .iter()
        .enumerate()
    {
        println!("  s{i} = {:?}", task.render_facts(state.iter()));
    }

    let recognition = load_recognition_problem(
        DOMAIN,
        PROBLEM,
        "(g)\n(r)\n",
        Some("(g)\n"),
        Some("(a)\n(b)\n"),
    )?;
    let result = recognize(&recognition, Heuristic::GoalCompletion)?;
    println!("\nrecognition after observing (a) (b):");
    for h in &result.hypotheses {
        println!("  {} -> {:.3}", h.goal_text, h.score_f64());
    }
    println!("  top: {:?}", result.top_texts());
    Ok(())
}
