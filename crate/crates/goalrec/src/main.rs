//! Command-line front end: `recognize`, `landmarks`, `degrade`, and `bench`.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use goalrec::eval::{aggregate, roc_points, run_corpus, RocGrouping, RunConfig};
use goalrec::ground::{ground, GroundedTask};
use goalrec::landmarks::OverlookedExclusion;
use goalrec::orpg::build_orpg;
use goalrec::parse::{load_recognition_problem, parse_domain, serialize_domain};
use goalrec::recognition::{recognize_with, Heuristic, RecognitionReport, RecognizeOptions};
use goalrec::{DegradeSpec, DegradeVariant};

#[derive(Parser)]
#[command(
    name = "goalrec",
    version,
    about = "Landmark-based goal recognition over incomplete STRIPS domain models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum HeuristicArg {
    /// Goal-completion ratio.
    Gc,
    /// Uniqueness-weighted completion.
    Uniq,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Gc => Heuristic::GoalCompletion,
            HeuristicArg::Uniq => Heuristic::Uniqueness,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    S1,
    S12,
    S123,
}

impl From<VariantArg> for DegradeVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::S1 => DegradeVariant::S1,
            VariantArg::S12 => DegradeVariant::S12,
            VariantArg::S123 => DegradeVariant::S123,
        }
    }
}

#[derive(Args)]
struct ProblemInputs {
    /// Annotated incomplete domain file.
    #[arg(short = 'd', long)]
    domain: PathBuf,
    /// Problem file (objects and initial state).
    #[arg(short = 'p', long)]
    problem: PathBuf,
    /// Hypotheses file: one candidate goal per line.
    #[arg(short = 'g', long)]
    hypotheses: PathBuf,
    /// Write the grounded task as newline-delimited records to this file.
    #[arg(long, value_name = "FILE")]
    dump_ground: Option<PathBuf>,
    /// Write fact/action first levels as tab-separated text to this file.
    #[arg(long, value_name = "FILE")]
    dump_orpg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the candidate goals against an observation trace and emit JSON.
    Recognize {
        #[command(flatten)]
        inputs: ProblemInputs,
        /// Observation trace: one ground action signature per line.
        #[arg(short = 'o', long)]
        observations: PathBuf,
        /// Hidden-goal file; when given, the report records whether it was
        /// among the returned goals.
        #[arg(short = 'r', long)]
        real_goal: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "gc")]
        heuristic: HeuristicArg,
        /// Test overlooked candidates by excluding every achiever instead of
        /// only observed ones.
        #[arg(long)]
        overlooked_all_achievers: bool,
    },
    /// Print the definite/possible/overlooked landmark sets per hypothesis.
    Landmarks {
        #[command(flatten)]
        inputs: ProblemInputs,
        /// Optional observation trace enabling overlooked-landmark discovery.
        #[arg(short = 'o', long)]
        observations: Option<PathBuf>,
    },
    /// Degrade a complete STRIPS domain into an annotated incomplete one.
    Degrade {
        /// Complete domain file.
        #[arg(short = 'd', long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 20)]
        percent: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "s1")]
        variant: VariantArg,
        /// Output file for single-domain mode.
        #[arg(short = 'o', long, conflicts_with = "suite_dir")]
        output: Option<PathBuf>,
        /// Emit a full suite (every percent x every variant) into this
        /// directory instead of one file.
        #[arg(long, value_name = "DIR")]
        suite_dir: Option<PathBuf>,
        /// Percentages for suite mode.
        #[arg(long, value_delimiter = ',', default_value = "20,40,60,80")]
        percents: Vec<u32>,
        /// Number of seeded draws per combination in suite mode.
        #[arg(long, default_value_t = 1)]
        draws: u64,
    },
    /// Batch-run recognition over a corpus and emit CSV tables.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated heuristics to run.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "gc,uniq")]
        heuristic: Vec<HeuristicArg>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Per-problem time limit in seconds.
        #[arg(long, default_value_t = 120.0)]
        timeout: f64,
        /// Aggregate CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// ROC-space CSV output path.
        #[arg(long)]
        roc: Option<PathBuf>,
        /// Emit one ROC point per problem instead of grouped sums.
        #[arg(long)]
        roc_per_problem: bool,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Recognize {
            inputs,
            observations,
            real_goal,
            heuristic,
            overlooked_all_achievers,
        } => cmd_recognize(
            inputs,
            observations,
            real_goal,
            heuristic.into(),
            overlooked_all_achievers,
        ),
        Command::Landmarks {
            inputs,
            observations,
        } => cmd_landmarks(inputs, observations),
        Command::Degrade {
            domain,
            percent,
            seed,
            variant,
            output,
            suite_dir,
            percents,
            draws,
        } => cmd_degrade(
            domain,
            percent,
            seed,
            variant.into(),
            output,
            suite_dir,
            percents,
            draws,
        ),
        Command::Bench {
            corpus,
            heuristic,
            workers,
            timeout,
            csv,
            roc,
            roc_per_problem,
        } => cmd_bench(
            corpus,
            heuristic,
            workers,
            timeout,
            csv,
            roc,
            roc_per_problem,
        ),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_inputs(
    inputs: &ProblemInputs,
    observations: Option<&Path>,
    real_goal: Option<&Path>,
) -> Result<goalrec::RecognitionProblem> {
    let domain_text = read(&inputs.domain)?;
    let problem_text = read(&inputs.problem)?;
    let hyps_text = read(&inputs.hypotheses)?;
    let obs_text = observations.map(read).transpose()?;
    let real_text = real_goal.map(read).transpose()?;
    let problem = load_recognition_problem(
        &domain_text,
        &problem_text,
        &hyps_text,
        real_text.as_deref(),
        obs_text.as_deref(),
    )?;
    Ok(problem)
}

fn handle_dumps(inputs: &ProblemInputs, problem: &goalrec::RecognitionProblem) -> Result<()> {
    if inputs.dump_ground.is_none() && inputs.dump_orpg.is_none() {
        return Ok(());
    }
    let task = ground(&problem.domain, &problem.objects, &problem.init)?;
    if let Some(path) = &inputs.dump_ground {
        let mut out = String::new();
        dump_ground(&task, &mut out);
        fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &inputs.dump_orpg {
        let mut out = String::new();
        dump_orpg(&task, &mut out);
        fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn dump_ground(task: &GroundedTask, out: &mut String) {
    use std::fmt::Write as _;
    for f in task.fact_ids() {
        let marker = if task.init.contains(&f) {
            "init"
        } else {
            "fact"
        };
        writeln!(out, "{marker}\t{}", task.fact(f)).unwrap();
    }
    for a in &task.actions {
        let join = |ids: &[goalrec::ground::FactId]| {
            ids.iter()
                .map(|f| task.fact(*f).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(
            out,
            "action\t{}\tpre={}\tposs_pre={}\tadd={}\tdel={}\tposs_add={}\tposs_del={}",
            a.signature,
            join(&a.pre),
            join(&a.poss_pre),
            join(&a.add),
            join(&a.del),
            join(&a.poss_add),
            join(&a.poss_del),
        )
        .unwrap();
    }
}

fn dump_orpg(task: &GroundedTask, out: &mut String) {
    use std::fmt::Write as _;
    let graph = build_orpg(task, &task.init, &BTreeSet::new());
    for f in task.fact_ids() {
        match graph.fact_level(f) {
            Some(l) => writeln!(out, "F\t{l}\t{}", task.fact(f)).unwrap(),
            None => writeln!(out, "F\tunreachable\t{}", task.fact(f)).unwrap(),
        }
    }
    for a in task.action_ids() {
        match graph.action_level(a) {
            Some(l) => writeln!(out, "A\t{l}\t{}", task.action(a).signature).unwrap(),
            None => writeln!(out, "A\tnever\t{}", task.action(a).signature).unwrap(),
        }
    }
}

fn cmd_recognize(
    inputs: ProblemInputs,
    observations: PathBuf,
    real_goal: Option<PathBuf>,
    heuristic: Heuristic,
    overlooked_all_achievers: bool,
) -> Result<()> {
    let problem = load_inputs(&inputs, Some(&observations), real_goal.as_deref())?;
    handle_dumps(&inputs, &problem)?;
    let options = RecognizeOptions {
        overlooked: if overlooked_all_achievers {
            OverlookedExclusion::AllAchievers
        } else {
            OverlookedExclusion::ObservedOnly
        },
        ..Default::default()
    };
    let result = recognize_with(&problem, heuristic, options)?;
    for w in &result.warnings {
        eprintln!(
            "warning: observation {} `{}` is not applicable (missing {}); effects counted anyway",
            w.step,
            w.action,
            w.missing.join(" ")
        );
    }
    let mut report = serde_json::to_value(RecognitionReport::new(&result, heuristic))?;
    if let Some(hidden) = problem.hidden_goal {
        report["hidden_goal"] =
            serde_json::Value::String(goalrec::model::hypothesis_text(&problem.hypotheses[hidden]));
        report["correct"] = serde_json::Value::Bool(result.is_correct(hidden));
    }
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &report)?;
    writeln!(stdout)?;
    Ok(())
}

fn cmd_landmarks(inputs: ProblemInputs, observations: Option<PathBuf>) -> Result<()> {
    let problem = load_inputs(&inputs, observations.as_deref(), None)?;
    handle_dumps(&inputs, &problem)?;
    let result = recognize_with(
        &problem,
        Heuristic::GoalCompletion,
        RecognizeOptions::default(),
    )?;
    let task = &result.task;
    let mut stdout = std::io::stdout().lock();
    for (i, hyp) in result.hypotheses.iter().enumerate() {
        writeln!(stdout, "; hypothesis {i}: {}", hyp.goal_text)?;
        if !hyp.reachable {
            writeln!(
                stdout,
                "; goal not optimistically reachable; empty landmark set"
            )?;
        }
        for line in task.render_facts(hyp.landmarks.definite.iter()) {
            writeln!(stdout, "D {line}")?;
        }
        for line in task.render_facts(hyp.landmarks.possible.iter()) {
            writeln!(stdout, "P {line}")?;
        }
        for line in task.render_facts(hyp.landmarks.overlooked.iter()) {
            writeln!(stdout, "O {line}")?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_degrade(
    domain_path: PathBuf,
    percent: u32,
    seed: u64,
    variant: DegradeVariant,
    output: Option<PathBuf>,
    suite_dir: Option<PathBuf>,
    percents: Vec<u32>,
    draws: u64,
) -> Result<()> {
    let domain = parse_domain(&read(&domain_path)?)?;
    if let Some(dir) = suite_dir {
        if draws == 0 {
            bail!("--draws must be at least 1");
        }
        let seeds: Vec<u64> = (0..draws).map(|k| seed.wrapping_add(k)).collect();
        let files = goalrec::degrade_suite(&domain, &seeds, &percents, &dir)?;
        for f in files {
            println!("{}", f.display());
        }
        return Ok(());
    }
    let spec = DegradeSpec {
        percent,
        seed,
        variant,
    };
    let degraded = goalrec::degrade(&domain, &spec)?;
    let text = serialize_domain(&degraded);
    match output {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_bench(
    corpus: PathBuf,
    heuristics: Vec<HeuristicArg>,
    workers: usize,
    timeout: f64,
    csv: Option<PathBuf>,
    roc: Option<PathBuf>,
    roc_per_problem: bool,
) -> Result<()> {
    let config = RunConfig {
        heuristics: heuristics.into_iter().map(Heuristic::from).collect(),
        timeout: Duration::from_secs_f64(timeout),
        workers,
    };
    let records = run_corpus(&corpus, &config)?;
    let rows = aggregate(&records);
    println!(
        "{:<14} {:>7} {:>8} {:>4} {:>5} {:>4} {:>9} {:>7} {:>7} {:>8}",
        "domain",
        "percent",
        "variant",
        "obs",
        "heur",
        "n",
        "time_mean",
        "acc",
        "spread",
        "timeouts"
    );
    for r in &rows {
        println!(
            "{:<14} {:>7} {:>8} {:>4} {:>5} {:>4} {:>9.4} {:>7.1} {:>7.2} {:>8}",
            r.domain,
            r.percent,
            r.variant,
            r.observability,
            r.heuristic,
            r.n,
            r.time_mean,
            r.acc,
            r.spread,
            r.timeouts
        );
    }
    if let Some(path) = csv {
        let file =
            fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        goalrec::eval::write_aggregate_csv(&rows, file)?;
    }
    if let Some(path) = roc {
        let grouping = if roc_per_problem {
            RocGrouping::PerProblem
        } else {
            RocGrouping::DomainPercentObs
        };
        let points = roc_points(&records, grouping);
        let file =
            fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        goalrec::eval::write_roc_csv(&points, file)?;
    }
    Ok(())
}
