//! Module-level invariants checked against independent oracles: round-trip
//! parsing, binding-count grounding, graph soundness, landmark verification,
//! and the online overlooked-landmark contract.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use common::*;
use goalrec::ground::{ground, ActionId, FactId};
use goalrec::landmarks::{extract_landmarks, extract_overlooked, LandmarkSet, OverlookedExclusion};
use goalrec::model::TypedObject;
use goalrec::orpg::{apply_effects, build_orpg};
use goalrec::parse::{parse_domain, serialize_domain, serialize_domain_stripped};

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn domain_round_trip_is_structural_identity(seed in any::<u64>()) {
        let (domain, _) = random_propositional_task(seed);
        let text = serialize_domain(&domain);
        let reparsed = parse_domain(&text).unwrap();
        prop_assert_eq!(&reparsed, &domain);
        prop_assert_eq!(serialize_domain(&reparsed), text);
    }

    #[test]
    fn stripped_serialization_passes_a_strict_strips_validator(seed in any::<u64>()) {
        let (domain, _) = random_propositional_task(seed);
        let text = serialize_domain_stripped(&domain);
        prop_assert!(strict_strips_validate(&text));
        // The annotated form is accepted by this crate but not by the strict
        // classical validator unless all possible sets happen to be empty.
        let full = serialize_domain(&domain);
        if !domain.is_complete() {
            prop_assert!(!strict_strips_validate(&full));
        }
    }

    #[test]
    fn replayed_states_stay_inside_the_graph(seed in any::<u64>()) {
        // Relaxation soundness: optimistic execution (with known deletes)
        // never visits a fact the graph calls unreachable.
        let (domain, init) = random_propositional_task(seed);
        let task = ground(&domain, &[], &init).unwrap();
        let graph = build_orpg(&task, &task.init, &BTreeSet::new());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let mut state = task.init.clone();
        for _ in 0..12 {
            let applicable: Vec<ActionId> = task
                .action_ids()
                .filter(|&a| task.action(a).pre.iter().all(|f| state.contains(f)))
                .collect();
            if applicable.is_empty() {
                break;
            }
            let pick = applicable[rng.gen_range(0..applicable.len())];
            state = apply_effects(&task, &state, pick);
            for f in &state {
                prop_assert!(graph.fact_level(*f).is_some());
            }
        }
    }

    #[test]
    fn classical_reachability_matches_saturation_oracle(seed in any::<u64>()) {
        let (domain, init) = random_propositional_task(seed);
        let task = ground(&domain.stripped(), &[], &init).unwrap();
        let graph = build_orpg(&task, &task.init, &BTreeSet::new());
        let closure = relaxed_closure(&task, &task.init, &BTreeSet::new());
        for f in task.fact_ids() {
            prop_assert_eq!(graph.fact_level(f).is_some(), closure.contains(&f));
        }
    }

    #[test]
    fn enlarging_the_exclusion_set_never_recovers_reachability(seed in any::<u64>()) {
        let (domain, init) = random_propositional_task(seed);
        let task = ground(&domain, &[], &init).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let small: BTreeSet<ActionId> =
            task.action_ids().filter(|_| rng.gen_bool(0.25)).collect();
        let mut large = small.clone();
        large.extend(task.action_ids().filter(|_| rng.gen_bool(0.25)));
        let g_small = build_orpg(&task, &task.init, &small);
        let g_large = build_orpg(&task, &task.init, &large);
        for f in task.fact_ids() {
            let goal: BTreeSet<FactId> = [f].into_iter().collect();
            if g_large.reachable(&goal) {
                prop_assert!(g_small.reachable(&goal));
            }
        }
    }

    #[test]
    fn extraction_covers_the_goal_and_verifies_soundly(seed in any::<u64>()) {
        let (domain, init, goal) = unique_achiever_task(seed);
        let task = ground(&domain, &[], &init).unwrap();
        let goal_ids = task.resolve_facts(&goal).unwrap();
        let lm = extract_landmarks(&task, &goal_ids).unwrap();
        // Goal inclusion.
        for f in &goal_ids {
            prop_assert!(lm.definite.contains(f) || lm.possible.contains(f));
        }
        // Soundness: excluding a landmark's achievers severs the goal per an
        // independent saturation, except for trivially-true facts.
        for f in lm.definite.iter().chain(&lm.possible) {
            if goal_ids.contains(f) || task.init.contains(f) {
                continue;
            }
            let excluded: BTreeSet<ActionId> = task.producers(*f).iter().copied().collect();
            let closure = relaxed_closure(&task, &task.init, &excluded);
            prop_assert!(!goal_ids.iter().all(|g| closure.contains(g)));
        }
    }

    #[test]
    fn overlooked_accumulation_matches_full_prefix_extraction(seed in any::<u64>()) {
        let (domain, init, goal) = unique_achiever_task(seed % 11);
        let task = ground(&domain, &[], &init).unwrap();
        let goal_ids = task.resolve_facts(&goal).unwrap();
        let base = extract_landmarks(&task, &goal_ids).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let observed: Vec<ActionId> = task
            .action_ids()
            .filter(|_| rng.gen_bool(0.5))
            .collect();

        // Online accumulation over growing prefixes.
        let mut accumulated = base.clone();
        for end in 1..=observed.len() {
            let found = extract_overlooked(
                &task,
                &goal_ids,
                &observed[..end],
                &accumulated,
                OverlookedExclusion::ObservedOnly,
            );
            accumulated.overlooked.extend(found);
        }
        // One-shot extraction over the full prefix.
        let full = extract_overlooked(
            &task,
            &goal_ids,
            &observed,
            &base,
            OverlookedExclusion::ObservedOnly,
        );
        prop_assert_eq!(&accumulated.overlooked, &full);
        // Disjointness from the known sets.
        prop_assert!(accumulated.overlooked.is_disjoint(&base.definite));
        prop_assert!(accumulated.overlooked.is_disjoint(&base.possible));
        let _: &LandmarkSet = &accumulated;
    }
}

#[test]
fn ground_action_counts_match_binding_enumeration() {
    // Independent oracle: every type-consistent binding, counted as a plain
    // product over per-parameter candidate counts.
    let domain = parse_domain(BLOCKSWORLD_DOMAIN).unwrap();
    for n in [2usize, 3, 4, 5] {
        let objects: Vec<TypedObject> = (0..n)
            .map(|i| TypedObject::new(((b'a' + i as u8) as char).to_string(), "object"))
            .collect();
        let task = ground(&domain, &objects, &BTreeSet::new()).unwrap();
        let expected_actions: usize = domain
            .operators
            .iter()
            .map(|op| n.pow(op.parameters.len() as u32))
            .sum();
        let expected_facts: usize = domain
            .predicates
            .iter()
            .map(|p| n.pow(p.parameters.len() as u32))
            .sum();
        assert_eq!(task.num_actions(), expected_actions, "{n} blocks");
        assert_eq!(task.num_facts(), expected_facts, "{n} blocks");
    }
}

#[test]
fn typed_binding_counts_match_per_type_products() {
    let text = "\
(define (domain depot)
  (:requirements :strips :typing)
  (:types truck - object crate - object place - object)
  (:predicates (at ?t - truck ?p - place) (in ?c - crate ?t - truck))
  (:action drive
    :parameters (?t - truck ?from - place ?to - place)
    :precondition (at ?t ?from)
    :effect (and (at ?t ?to) (not (at ?t ?from))))
  (:action load
    :parameters (?c - crate ?t - truck)
    :precondition (at ?t ?t)
    :effect (in ?c ?t)))
";
    // `(at ?t ?t)` is ill-typed for place, so craft a valid one instead.
    let text = text.replace("(at ?t ?t)", "(in ?c ?t)");
    let domain = parse_domain(&text).unwrap();
    let objects = vec![
        TypedObject::new("t1", "truck"),
        TypedObject::new("t2", "truck"),
        TypedObject::new("c1", "crate"),
        TypedObject::new("p1", "place"),
        TypedObject::new("p2", "place"),
        TypedObject::new("p3", "place"),
    ];
    let task = ground(&domain, &objects, &BTreeSet::new()).unwrap();
    // drive: 2 trucks x 3 places x 3 places; load: 1 crate x 2 trucks.
    assert_eq!(task.num_actions(), 2 * 3 * 3 + 2);
    // at: 2 x 3; in: 1 x 2.
    assert_eq!(task.num_facts(), 6 + 2);
}
