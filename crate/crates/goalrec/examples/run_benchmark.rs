//! Build a small blocksworld corpus on disk, run the benchmark harness over
//! it, and print the aggregate table plus ROC-space points.
//!
//! ```bash
//! cargo run --example run_benchmark
//! ```

use std::collections::BTreeSet;

use goalrec::eval::{
    aggregate, roc_points, run_corpus, write_manifest, write_problem, ProblemFiles, RocGrouping,
    RunConfig,
};
use goalrec::model::{ActionSignature, Fact};
use goalrec::parse::{goal_line, parse_domain, serialize_domain};
use goalrec::recognition::Heuristic;
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

/// One instance: initial towers (bottom to top), candidate chains (bottom to
/// top), index of the hidden chain.
struct Instance {
    towers: &'static [&'static [&'static str]],
    chains: &'static [&'static [&'static str]],
    hidden: usize,
}

const INSTANCES: [Instance; 4] = [
    Instance {
        towers: &[&["a", "b", "c"], &["d", "e"]],
        chains: &[
            &["c", "d", "e"],
            &["e", "a", "b"],
            &["b", "d", "a"],
            &["a", "c", "e"],
        ],
        hidden: 0,
    },
    Instance {
        towers: &[&["e", "d"], &["c"], &["b", "a"]],
        chains: &[
            &["a", "b", "c"],
            &["d", "c", "b"],
            &["c", "e", "a"],
            &["b", "a", "d"],
        ],
        hidden: 1,
    },
    Instance {
        towers: &[&["a"], &["b"], &["c"], &["d"], &["e"]],
        chains: &[
            &["a", "d", "c"],
            &["e", "b", "a"],
            &["d", "e", "c"],
            &["c", "a", "b"],
        ],
        hidden: 2,
    },
    Instance {
        towers: &[&["d", "c", "b", "a"], &["e"]],
        chains: &[
            &["b", "e", "d"],
            &["a", "c", "e"],
            &["e", "d", "a"],
            &["c", "b", "e"],
        ],
        hidden: 3,
    },
];

impl Instance {
    fn init_facts(&self) -> BTreeSet<Fact> {
        let mut init = BTreeSet::new();
        init.insert(Fact::atom("handempty"));
        for tower in self.towers {
            init.insert(Fact::new("ontable", vec![tower[0].to_string()]));
            for pair in tower.windows(2) {
                init.insert(Fact::new(
                    "on",
                    vec![pair[1].to_string(), pair[0].to_string()],
                ));
            }
            init.insert(Fact::new("clear", vec![tower.last().unwrap().to_string()]));
        }
        init
    }

    fn goal_facts(chain: &[&str]) -> BTreeSet<Fact> {
        chain
            .windows(2)
            .map(|pair| Fact::new("on", vec![pair[1].to_string(), pair[0].to_string()]))
            .collect()
    }

    /// Unstack everything onto the table, then assemble the hidden chain.
    fn plan(&self) -> Vec<ActionSignature> {
        let mut plan = Vec::new();
        for tower in self.towers {
            for i in (1..tower.len()).rev() {
                plan.push(ActionSignature::new(
                    "unstack",
                    vec![tower[i].to_string(), tower[i - 1].to_string()],
                ));
                plan.push(ActionSignature::new("put-down", vec![tower[i].to_string()]));
            }
        }
        for pair in self.chains[self.hidden].windows(2) {
            plan.push(ActionSignature::new("pick-up", vec![pair[1].to_string()]));
            plan.push(ActionSignature::new(
                "stack",
                vec![pair[1].to_string(), pair[0].to_string()],
            ));
        }
        plan
    }

    fn problem_text(&self, name: &str) -> String {
        let mut out = format!(
            "(define (problem {name})\n  (:domain blocksworld)\n  (:objects a b c d e)\n  (:init"
        );
        for f in self.init_facts() {
            out.push(' ');
            out.push_str(&f.to_string());
        }
        out.push_str(")\n  (:goal (and");
        for f in Self::goal_facts(self.chains[self.hidden]) {
            out.push(' ');
            out.push_str(&f.to_string());
        }
        out.push_str(")))\n");
        out
    }
}

/// Every k-th action of the plan, preserving order.
fn thin_observations(plan: &[ActionSignature], percent: u32) -> String {
    let keep = ((plan.len() as u64 * percent as u64).div_ceil(100) as usize).clamp(1, plan.len());
    let step = plan.len() as f64 / keep as f64;
    let mut out = String::new();
    for i in 0..keep {
        out.push_str(&plan[(i as f64 * step) as usize].to_string());
        out.push('\n');
    }
    out
}

fn main() -> anyhow::Result<()> {
    let corpus = tempfile::tempdir()?;
    let complete = parse_domain(BLOCKSWORLD)?;

    let mut manifest = Vec::new();
    for percent in [20u32, 60] {
        let degraded = degrade(
            &complete,
            &DegradeSpec {
                percent,
                seed: 7,
                variant: DegradeVariant::S1,
            },
        )?;
        let domain_text = serialize_domain(&degraded);
        for (i, instance) in INSTANCES.iter().enumerate() {
            let plan = instance.plan();
            let hypotheses: String = instance
                .chains
                .iter()
                .map(|c| goal_line(&Instance::goal_facts(c)) + "\n")
                .collect();
            let files = ProblemFiles {
                domain: domain_text.clone(),
                template: instance.problem_text(&format!("bench-{percent}-{i}")),
                hypotheses,
                real_goal: goal_line(&Instance::goal_facts(instance.chains[instance.hidden]))
                    + "\n",
                observations: vec![
                    (30, thin_observations(&plan, 30)),
                    (100, thin_observations(&plan, 100)),
                ],
            };
            manifest.push(write_problem(
                corpus.path(),
                "blocksworld",
                percent,
                "s1",
                &format!("p{i:02}"),
                &files,
            )?);
        }
    }
    write_manifest(corpus.path(), &manifest)?;
    println!(
        "corpus: {} problems under {}\n",
        manifest.len(),
        corpus.path().display()
    );

    let config = RunConfig {
        heuristics: vec![Heuristic::GoalCompletion, Heuristic::Uniqueness],
        timeout: std::time::Duration::from_secs(120),
        workers: 2,
    };
    let records = run_corpus(corpus.path(), &config)?;

    println!(
        "{:<12} {:>7} {:>7} {:>4} {:>5} {:>3} {:>9} {:>6} {:>7}",
        "domain", "percent", "variant", "obs", "heur", "n", "time_mean", "acc", "spread"
    );
    for row in aggregate(&records) {
        println!(
            "{:<12} {:>7} {:>7} {:>4} {:>5} {:>3} {:>9.4} {:>6.1} {:>7.2}",
            row.domain,
            row.percent,
            row.variant,
            row.observability,
            row.heuristic,
            row.n,
            row.time_mean,
            row.acc,
            row.spread
        );
    }

    println!("\nROC points (per domain/percent/observability):");
    for p in roc_points(&records, RocGrouping::DomainPercentObs) {
        println!("  {:<22} tpr {:.2} fpr {:.2}", p.group, p.tpr, p.fpr);
    }
    Ok(())
}
