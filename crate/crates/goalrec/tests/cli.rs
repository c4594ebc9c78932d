//! End-to-end checks of the command-line surface: file formats in, JSON and
//! CSV out.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use common::*;

const ABSTRACT_DOMAIN: &str = "\
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

const ABSTRACT_PROBLEM: &str = "\
(define (problem abstract-1)
  (:domain abstract)
  (:init (p) (q))
  (:goal (and (g))))
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_goalrec"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_abstract_fixture(dir: &Path) -> (String, String, String, String) {
    let d = dir.join("domain.pddl");
    let p = dir.join("problem.pddl");
    let g = dir.join("hyps.dat");
    let o = dir.join("trace.obs");
    fs::write(&d, ABSTRACT_DOMAIN).unwrap();
    fs::write(&p, ABSTRACT_PROBLEM).unwrap();
    fs::write(&g, "(g)\n(r)\n").unwrap();
    fs::write(&o, "; full trace\n(a)\n(b)\n(c)\n").unwrap();
    (
        d.to_string_lossy().into_owned(),
        p.to_string_lossy().into_owned(),
        g.to_string_lossy().into_owned(),
        o.to_string_lossy().into_owned(),
    )
}

#[test]
fn recognize_emits_scores_counts_and_top() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p, g, o) = write_abstract_fixture(dir.path());
    let out = run_ok(bin().args([
        "recognize",
        "-d",
        &d,
        "-p",
        &p,
        "-g",
        &g,
        "-o",
        &o,
        "--heuristic",
        "gc",
    ]));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["heuristic"], "gc");
    assert!(report["duration_seconds"].as_f64().unwrap() >= 0.0);
    let hyps = report["hypotheses"].as_array().unwrap();
    assert_eq!(hyps.len(), 2);
    assert_eq!(hyps[0]["goal"], "(and (g))");
    assert_eq!(hyps[0]["score"], 1.0);
    assert_eq!(hyps[0]["landmarks"]["definite"], 2);
    assert_eq!(hyps[0]["landmarks"]["possible"], 2);
    assert_eq!(hyps[0]["achieved"]["definite"], 2);
    // Both goals complete on the full trace.
    let top: Vec<&str> = report["top"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(top, vec!["(and (g))", "(and (r))"]);
}

#[test]
fn recognize_with_real_goal_reports_correctness() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p, g, o) = write_abstract_fixture(dir.path());
    let r = dir.path().join("real.dat");
    fs::write(&r, "(g)\n").unwrap();
    let out = run_ok(bin().args([
        "recognize",
        "-d",
        &d,
        "-p",
        &p,
        "-g",
        &g,
        "-o",
        &o,
        "-r",
        r.to_str().unwrap(),
        "--heuristic",
        "uniq",
    ]));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["hidden_goal"], "(and (g))");
    assert_eq!(report["correct"], true);
}

#[test]
fn recognize_json_is_deterministic_apart_from_duration() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p, g, o) = write_abstract_fixture(dir.path());
    let args = [
        "recognize",
        "-d",
        &d,
        "-p",
        &p,
        "-g",
        &g,
        "-o",
        &o,
        "--heuristic",
        "uniq",
    ];
    let mut a: serde_json::Value =
        serde_json::from_slice(&run_ok(bin().args(args)).stdout).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_slice(&run_ok(bin().args(args)).stdout).unwrap();
    a["duration_seconds"] = serde_json::Value::Null;
    b["duration_seconds"] = serde_json::Value::Null;
    assert_eq!(a, b);
}

#[test]
fn landmarks_prints_sorted_prefixed_sets() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p, g, _) = write_abstract_fixture(dir.path());
    let out = run_ok(bin().args(["landmarks", "-d", &d, "-p", &p, "-g", &g]));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.contains(&"; hypothesis 0: (and (g))"));
    assert!(lines.contains(&"D (g)"));
    assert!(lines.contains(&"D (r)"));
    assert!(lines.contains(&"P (p)"));
    assert!(lines.contains(&"P (q)"));
}

#[test]
fn landmarks_with_observations_reports_overlooked_lines() {
    // Chain domain whose genuine landmark w escapes extraction but is
    // confirmed online from the observations.
    let domain = "\
(define (domain deep)
  (:predicates (s) (w) (x) (y) (g))
  (:action aw :parameters () :precondition (s) :effect (w))
  (:action ax :parameters () :precondition (w) :effect (x))
  (:action ay :parameters () :precondition (w) :effect (y))
  (:action finish-x :parameters () :precondition (x) :effect (g))
  (:action finish-y :parameters () :precondition (y) :effect (g)))
";
    let problem = "(define (problem deep-1) (:domain deep) (:init (s)) (:goal (g)))";
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.pddl");
    let p = dir.path().join("p.pddl");
    let g = dir.path().join("h.dat");
    let o = dir.path().join("t.obs");
    fs::write(&d, domain).unwrap();
    fs::write(&p, problem).unwrap();
    fs::write(&g, "(g)\n").unwrap();
    fs::write(&o, "(aw)\n(ax)\n(finish-x)\n").unwrap();
    let out = run_ok(bin().args([
        "landmarks",
        "-d",
        d.to_str().unwrap(),
        "-p",
        p.to_str().unwrap(),
        "-g",
        g.to_str().unwrap(),
        "-o",
        o.to_str().unwrap(),
    ]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "O (w)"), "output:\n{text}");
}

#[test]
fn dump_flags_emit_ground_and_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p, g, _) = write_abstract_fixture(dir.path());
    let ground_file = dir.path().join("ground.txt");
    let orpg_file = dir.path().join("orpg.txt");
    run_ok(bin().args([
        "landmarks",
        "-d",
        &d,
        "-p",
        &p,
        "-g",
        &g,
        "--dump-ground",
        ground_file.to_str().unwrap(),
        "--dump-orpg",
        orpg_file.to_str().unwrap(),
    ]));
    let ground_text = fs::read_to_string(&ground_file).unwrap();
    assert!(ground_text.contains("init\t(p)"));
    assert!(ground_text
        .lines()
        .any(|l| l.starts_with("action\t(b)\t") && l.contains("add=(r)")));
    let orpg_text = fs::read_to_string(&orpg_file).unwrap();
    assert!(orpg_text.contains("F\t0\t(p)"));
    assert!(orpg_text.contains("F\t2\t(g)"));
    assert!(orpg_text.contains("A\t1\t(c)"));
}

#[test]
fn degrade_single_file_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("blocks.pddl");
    fs::write(&d, BLOCKSWORLD_DOMAIN).unwrap();
    let out1 = dir.path().join("out1.pddl");
    let out2 = dir.path().join("out2.pddl");
    for out in [&out1, &out2] {
        run_ok(bin().args([
            "degrade",
            "-d",
            d.to_str().unwrap(),
            "--percent",
            "40",
            "--seed",
            "7",
            "--variant",
            "s123",
            "-o",
            out.to_str().unwrap(),
        ]));
    }
    let b1 = fs::read(&out1).unwrap();
    let b2 = fs::read(&out2).unwrap();
    assert_eq!(b1, b2);
    let parsed = goalrec::parse::parse_domain(&String::from_utf8(b1).unwrap()).unwrap();
    parsed.validate().unwrap();
    assert!(!parsed.is_complete());
}

#[test]
fn degrade_suite_emits_twelve_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("blocks.pddl");
    fs::write(&d, BLOCKSWORLD_DOMAIN).unwrap();
    let suite = dir.path().join("suite");
    let out = run_ok(bin().args([
        "degrade",
        "-d",
        d.to_str().unwrap(),
        "--suite-dir",
        suite.to_str().unwrap(),
        "--seed",
        "11",
    ]));
    let listed = String::from_utf8(out.stdout).unwrap().lines().count();
    assert_eq!(listed, 12);
    let files: Vec<_> = fs::read_dir(&suite).unwrap().flatten().collect();
    assert_eq!(files.len(), 12);
    assert!(suite.join("blocksworld-incomplete-20-s1.pddl").is_file());
    assert!(suite.join("blocksworld-incomplete-80-s123.pddl").is_file());
}

#[test]
fn bench_writes_pinned_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("corpus");

    // Two tiny problems at one incompleteness level.
    let blocksworld = goalrec::parse::parse_domain(BLOCKSWORLD_DOMAIN).unwrap();
    let degraded = goalrec::degrade(
        &blocksworld,
        &goalrec::DegradeSpec {
            percent: 20,
            seed: 5,
            variant: goalrec::DegradeVariant::S1,
        },
    )
    .unwrap();
    let domain_text = goalrec::parse::serialize_domain(&degraded);
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut manifest = Vec::new();
    for i in 0..2 {
        let instance = gen_blocks_instance(&mut rng, 5, 4);
        let plan = instance.plan();
        let files = goalrec::eval::ProblemFiles {
            domain: domain_text.clone(),
            template: instance.problem_text(&format!("cli-{i}")),
            hypotheses: instance.hypotheses_text(),
            real_goal: instance.real_goal_text(),
            observations: vec![
                (
                    50,
                    observations_text(&sample_observations(&mut rng, &plan, 50)),
                ),
                (100, observations_text(&plan)),
            ],
        };
        manifest.push(
            goalrec::eval::write_problem(&root, "blocksworld", 20, "s1", &format!("p{i}"), &files)
                .unwrap(),
        );
    }
    goalrec::eval::write_manifest(&root, &manifest).unwrap();

    let csv_path = dir.path().join("out.csv");
    let roc_path = dir.path().join("roc.csv");
    let out = run_ok(bin().args([
        "bench",
        "--corpus",
        root.to_str().unwrap(),
        "--heuristic",
        "gc,uniq",
        "--workers",
        "2",
        "--timeout",
        "60",
        "--csv",
        csv_path.to_str().unwrap(),
        "--roc",
        roc_path.to_str().unwrap(),
    ]));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("blocksworld"));

    let csv_text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "domain,percent,variant,observability,heuristic,n,time_mean,acc,spread,timeouts"
    );
    // 1 domain x 1 percent x 1 variant x 2 obs levels x 2 heuristics.
    assert_eq!(lines.count(), 4);

    let roc_text = fs::read_to_string(&roc_path).unwrap();
    assert!(roc_text.starts_with("group,tp,fp,tn,fn,tpr,fpr"));
    assert_eq!(roc_text.lines().count(), 1 + 2);
}

#[test]
fn unknown_observation_is_a_readable_error() {
    let dir = tempfile::tempdir().unwrap();
    let (d, p, g, _) = write_abstract_fixture(dir.path());
    let o = dir.path().join("bad.obs");
    fs::write(&o, "(warp)\n").unwrap();
    let out = bin()
        .args([
            "recognize",
            "-d",
            &d,
            "-p",
            &p,
            "-g",
            &g,
            "-o",
            o.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown action"), "stderr: {stderr}");
}
