//! Reproducible domain degradation: move known preconditions and effects
//! into possible lists at a target incompleteness percentage and count the
//! resulting completions.
//!
//! ```bash
//! cargo run --example degrade_domain
//! ```

use goalrec::ground::count_completions;
use goalrec::parse::{parse_domain, serialize_domain};
use goalrec::{degrade, DegradeSpec, DegradeVariant};

const LOGISTICS: &str = "\
(define (domain mini-logistics)
  (:requirements :strips :typing)
  (:types truck - object box - object place - object)
  (:predicates (at ?t - truck ?p - place) (box-at ?b - box ?p - place) (loaded ?b - box ?t - truck))
  (:action drive
    :parameters (?t - truck ?from - place ?to - place)
    :precondition (at ?t ?from)
    :effect (and (at ?t ?to) (not (at ?t ?from))))
  (:action load
    :parameters (?b - box ?t - truck ?p - place)
    :precondition (and (at ?t ?p) (box-at ?b ?p))
    :effect (and (loaded ?b ?t) (not (box-at ?b ?p))))
  (:action unload
    :parameters (?b - box ?t - truck ?p - place)
    :precondition (and (at ?t ?p) (loaded ?b ?t))
    :effect (and (box-at ?b ?p) (not (loaded ?b ?t)))))
";

fn main() -> anyhow::Result<()> {
    let complete = parse_domain(LOGISTICS)?;
    println!(
        "complete model: completions = {}",
        count_completions(&complete).completions
    );

    for variant in DegradeVariant::ALL {
        println!("\nvariant {variant}:");
        for percent in [20u32, 40, 60, 80] {
            let spec = DegradeSpec {
                percent,
                seed: 42,
                variant,
            };
            let degraded = degrade(&complete, &spec)?;
            let c = count_completions(&degraded);
            let possible: usize = degraded.operators.iter().map(|o| o.possible_count()).sum();
            println!(
                "  {percent:>3}%: {possible:>2} possible literals, k = {:>2}, completions = {}",
                c.k, c.completions
            );
        }
    }

    let spec = DegradeSpec {
        percent: 40,
        seed: 42,
        variant: DegradeVariant::S12,
    };
    println!("\nannotated file at 40% (variant s12):\n");
    print!("{}", serialize_domain(&degrade(&complete, &spec)?));
    Ok(())
}
