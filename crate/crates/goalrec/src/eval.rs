//! Corpus benchmark harness: batch recognition with per-problem timeouts,
//! Time/Accuracy/Spread aggregation, and ROC-space points.
//!
//! Corpus layout, rooted at a directory containing `manifest.txt`:
//!
//! ```text
//! <root>/manifest.txt                 one problem directory per line
//! <root>/<domain>/<percent>/<variant>/<problem>/
//!     domain.pddl                     annotated incomplete domain
//!     template.pddl                   problem file (objects + init)
//!     hyps.dat                        one candidate goal per line
//!     real_goal.dat                   the hidden goal
//!     <observability>/obs.dat         observed actions per level, e.g. 10/, 100/
//! ```
//!
//! The manifest makes partial corpora explicit: only listed directories run.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::RecognitionProblem;
use crate::parse::{
    parse_domain, parse_hidden_goal, parse_hypotheses, parse_observation_lines, parse_problem,
    ParseError,
};
use crate::recognition::{recognize_with, Heuristic, RecognizeError, RecognizeOptions};
use crate::Deadline;

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const DOMAIN_FILE: &str = "domain.pddl";
pub const TEMPLATE_FILE: &str = "template.pddl";
pub const HYPOTHESES_FILE: &str = "hyps.dat";
pub const REAL_GOAL_FILE: &str = "real_goal.dat";
pub const OBSERVATIONS_FILE: &str = "obs.dat";

/// One problem directory named by the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub domain_name: String,
    pub percent: u32,
    pub variant: String,
    pub problem: String,
    pub dir: PathBuf,
}

impl CorpusEntry {
    /// Observability levels present on disk, ascending.
    pub fn observability_levels(&self) -> Vec<u32> {
        let mut levels = Vec::new();
        if let Ok(read) = fs::read_dir(&self.dir) {
            for entry in read.flatten() {
                if let Ok(level) = entry.file_name().to_string_lossy().parse::<u32>() {
                    if entry.path().join(OBSERVATIONS_FILE).is_file() {
                        levels.push(level);
                    }
                }
            }
        }
        levels.sort_unstable();
        levels
    }
}

/// Reads the manifest and resolves entries; malformed lines are skipped with
/// a diagnostic on stderr.
pub fn discover(root: &Path) -> io::Result<Vec<CorpusEntry>> {
    let manifest = fs::read_to_string(root.join(MANIFEST_NAME))?;
    let mut entries = Vec::new();
    for line in manifest.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let components: Vec<&str> = line.split('/').filter(|c| !c.is_empty()).collect();
        if components.len() < 4 {
            eprintln!("skipping malformed manifest entry `{line}` (expected domain/percent/variant/problem)");
            continue;
        }
        let percent = match components[1].parse::<u32>() {
            Ok(p) => p,
            Err(_) => {
                eprintln!(
                    "skipping manifest entry `{line}`: `{}` is not a percentage",
                    components[1]
                );
                continue;
            }
        };
        let dir = root.join(line);
        if !dir.is_dir() {
            eprintln!("skipping manifest entry `{line}`: directory not found");
            continue;
        }
        entries.push(CorpusEntry {
            domain_name: components[0].to_string(),
            percent,
            variant: components[2].to_string(),
            problem: components[3..].join("/"),
            dir,
        });
    }
    Ok(entries)
}

/// Result of one `(problem, observability, heuristic)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub domain: String,
    pub percent: u32,
    pub variant: String,
    pub observability: u32,
    pub heuristic: Heuristic,
    pub problem: String,
    pub duration_seconds: f64,
    pub timed_out: bool,
    /// Whether the hidden goal was among the returned goals.
    pub correct: bool,
    /// Number of returned goals.
    pub spread: usize,
    pub true_pos: u32,
    pub false_pos: u32,
    pub true_neg: u32,
    pub false_neg: u32,
    pub num_hypotheses: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub heuristics: Vec<Heuristic>,
    pub timeout: Duration,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        // Two-minute default budget per problem.
        RunConfig {
            heuristics: vec![Heuristic::GoalCompletion],
            timeout: Duration::from_secs(120),
            workers: 1,
        }
    }
}

/// Runs every manifest entry at every observability level under every
/// heuristic. Problems run in parallel up to `workers`; the record order is
/// deterministic regardless of worker count. Timeouts become records with
/// `timed_out = true`; unloadable problems are skipped with a diagnostic.
pub fn run_corpus(root: &Path, config: &RunConfig) -> io::Result<Vec<ExperimentRecord>> {
    let entries = discover(root)?;
    let mut jobs: Vec<(CorpusEntry, u32, Heuristic)> = Vec::new();
    for entry in entries {
        for level in entry.observability_levels() {
            for &heuristic in &config.heuristics {
                jobs.push((entry.clone(), level, heuristic));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;
    let timeout = config.timeout;
    let records: Vec<Option<ExperimentRecord>> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|(entry, level, heuristic)| run_one(entry, *level, *heuristic, timeout))
            .collect()
    });
    Ok(records.into_iter().flatten().collect())
}

fn load_problem_lazily(
    domain_text: &str,
    template_text: &str,
    hyps_text: &str,
    real_goal_text: &str,
    obs_text: &str,
) -> Result<RecognitionProblem, ParseError> {
    let domain = parse_domain(domain_text)?;
    let problem = parse_problem(&domain, template_text)?;
    let hypotheses = parse_hypotheses(&domain, &problem.objects, hyps_text)?;
    let hidden_goal = Some(parse_hidden_goal(
        &domain,
        &problem.objects,
        &hypotheses,
        real_goal_text,
    )?);
    let observations = parse_observation_lines(obs_text)?;
    Ok(RecognitionProblem {
        domain,
        objects: problem.objects,
        init: problem.init,
        hypotheses,
        hidden_goal,
        observations,
    })
}

fn run_one(
    entry: &CorpusEntry,
    observability: u32,
    heuristic: Heuristic,
    timeout: Duration,
) -> Option<ExperimentRecord> {
    let read = |name: &Path| -> Option<String> {
        match fs::read_to_string(name) {
            Ok(s) => Some(s),
            Err(e) => {
                eprintln!(
                    "skipping {}: cannot read {}: {e}",
                    entry.dir.display(),
                    name.display()
                );
                None
            }
        }
    };
    let domain_text = read(&entry.dir.join(DOMAIN_FILE))?;
    let template_text = read(&entry.dir.join(TEMPLATE_FILE))?;
    let hyps_text = read(&entry.dir.join(HYPOTHESES_FILE))?;
    let real_goal_text = read(&entry.dir.join(REAL_GOAL_FILE))?;
    let obs_text = read(
        &entry
            .dir
            .join(observability.to_string())
            .join(OBSERVATIONS_FILE),
    )?;

    // Observation signatures are parsed syntactically here and resolved by
    // the recognizer, so even grounding runs under the per-problem budget.
    let problem = match load_problem_lazily(
        &domain_text,
        &template_text,
        &hyps_text,
        &real_goal_text,
        &obs_text,
    ) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("skipping {} at {observability}%: {e}", entry.dir.display());
            return None;
        }
    };
    let hidden = problem
        .hidden_goal
        .expect("hidden goal is present by construction");
    let num_hypotheses = problem.hypotheses.len();

    let options = RecognizeOptions {
        deadline: Some(Deadline::after(timeout)),
        ..Default::default()
    };
    match recognize_with(&problem, heuristic, options) {
        Ok(result) => {
            let spread = result.spread();
            let correct = result.is_correct(hidden);
            let true_pos = u32::from(correct);
            let false_pos = spread as u32 - true_pos;
            let false_neg = 1 - true_pos;
            let true_neg = num_hypotheses as u32 - spread as u32 - false_neg;
            Some(ExperimentRecord {
                domain: entry.domain_name.clone(),
                percent: entry.percent,
                variant: entry.variant.clone(),
                observability,
                heuristic,
                problem: entry.problem.clone(),
                duration_seconds: result.duration.as_secs_f64(),
                timed_out: false,
                correct,
                spread,
                true_pos,
                false_pos,
                true_neg,
                false_neg,
                num_hypotheses,
            })
        }
        Err(RecognizeError::Timeout) => Some(ExperimentRecord {
            domain: entry.domain_name.clone(),
            percent: entry.percent,
            variant: entry.variant.clone(),
            observability,
            heuristic,
            problem: entry.problem.clone(),
            duration_seconds: timeout.as_secs_f64(),
            timed_out: true,
            correct: false,
            spread: 0,
            true_pos: 0,
            false_pos: 0,
            true_neg: 0,
            false_neg: 0,
            num_hypotheses,
        }),
        Err(e) => {
            eprintln!("skipping {} at {observability}%: {e}", entry.dir.display());
            None
        }
    }
}

/// One row of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub domain: String,
    pub percent: u32,
    pub variant: String,
    pub observability: u32,
    pub heuristic: String,
    /// Records in the group, timeouts included.
    pub n: usize,
    /// Mean recognition time over completed runs, seconds.
    pub time_mean: f64,
    /// 100 * mean(correct) over completed runs.
    pub acc: f64,
    /// Mean spread over completed runs.
    pub spread: f64,
    pub timeouts: usize,
}

/// Groups records by (domain, percent, variant, observability, heuristic).
/// Timeouts count toward `n` and `timeouts` but are excluded from the Time,
/// Acc, and Spread averages.
pub fn aggregate(records: &[ExperimentRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(String, u32, String, u32, String), Vec<&ExperimentRecord>> =
        BTreeMap::new();
    for r in records {
        groups
            .entry((
                r.domain.clone(),
                r.percent,
                r.variant.clone(),
                r.observability,
                r.heuristic.tag().to_string(),
            ))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(
            |((domain, percent, variant, observability, heuristic), rs)| {
                let completed: Vec<&&ExperimentRecord> =
                    rs.iter().filter(|r| !r.timed_out).collect();
                let timeouts = rs.len() - completed.len();
                let denom = completed.len().max(1) as f64;
                // Sum in sorted order so aggregation is invariant under record
                // reordering despite float rounding.
                let mut durations: Vec<f64> =
                    completed.iter().map(|r| r.duration_seconds).collect();
                durations.sort_by(f64::total_cmp);
                let spread_total: usize = completed.iter().map(|r| r.spread).sum();
                AggregateRow {
                    domain,
                    percent,
                    variant,
                    observability,
                    heuristic,
                    n: rs.len(),
                    time_mean: durations.iter().sum::<f64>() / denom,
                    acc: 100.0 * completed.iter().filter(|r| r.correct).count() as f64 / denom,
                    spread: spread_total as f64 / denom,
                    timeouts,
                }
            },
        )
        .collect()
}

/// Granularity of ROC-space points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RocGrouping {
    /// Sum confusion counts per (domain, percent, observability).
    #[default]
    DomainPercentObs,
    /// One point per record.
    PerProblem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub group: String,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fneg: u64,
    pub tpr: f64,
    pub fpr: f64,
}

/// Converts completed records into ROC-space points. Every candidate goal of
/// every problem counts as one binary prediction: predicted-positive exactly
/// when the goal was returned.
pub fn roc_points(records: &[ExperimentRecord], grouping: RocGrouping) -> Vec<RocPoint> {
    let completed = records.iter().filter(|r| !r.timed_out);
    let mut grouped: BTreeMap<String, (u64, u64, u64, u64)> = BTreeMap::new();
    for r in completed {
        let key = match grouping {
            RocGrouping::DomainPercentObs => {
                format!("{}/{}/{}", r.domain, r.percent, r.observability)
            }
            RocGrouping::PerProblem => format!(
                "{}/{}/{}/{}/{}/{}",
                r.domain, r.percent, r.variant, r.problem, r.observability, r.heuristic
            ),
        };
        let counts = grouped.entry(key).or_default();
        counts.0 += r.true_pos as u64;
        counts.1 += r.false_pos as u64;
        counts.2 += r.true_neg as u64;
        counts.3 += r.false_neg as u64;
    }
    grouped
        .into_iter()
        .map(|(group, (tp, fp, tn, fneg))| {
            let tpr = if tp + fneg == 0 {
                0.0
            } else {
                tp as f64 / (tp + fneg) as f64
            };
            let fpr = if fp + tn == 0 {
                0.0
            } else {
                fp as f64 / (fp + tn) as f64
            };
            RocPoint {
                group,
                tp,
                fp,
                tn,
                fneg,
                tpr,
                fpr,
            }
        })
        .collect()
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_aggregate_csv<R: Read>(reader: R) -> csv::Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize().collect()
}

pub fn write_roc_csv<W: Write>(points: &[RocPoint], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

/// File contents for one corpus problem.
#[derive(Debug, Clone)]
pub struct ProblemFiles {
    pub domain: String,
    pub template: String,
    pub hypotheses: String,
    pub real_goal: String,
    /// `(observability percent, obs.dat content)` pairs.
    pub observations: Vec<(u32, String)>,
}

/// Writes one problem directory in the corpus layout and returns its
/// manifest line.
pub fn write_problem(
    root: &Path,
    domain_name: &str,
    percent: u32,
    variant: &str,
    problem_name: &str,
    files: &ProblemFiles,
) -> io::Result<String> {
    let rel = format!("{domain_name}/{percent}/{variant}/{problem_name}");
    let dir = root.join(&rel);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(DOMAIN_FILE), &files.domain)?;
    fs::write(dir.join(TEMPLATE_FILE), &files.template)?;
    fs::write(dir.join(HYPOTHESES_FILE), &files.hypotheses)?;
    fs::write(dir.join(REAL_GOAL_FILE), &files.real_goal)?;
    for (level, obs) in &files.observations {
        let obs_dir = dir.join(level.to_string());
        fs::create_dir_all(&obs_dir)?;
        fs::write(obs_dir.join(OBSERVATIONS_FILE), obs)?;
    }
    Ok(rel)
}

/// Writes the manifest listing the given problem lines.
pub fn write_manifest(root: &Path, lines: &[String]) -> io::Result<()> {
    fs::create_dir_all(root)?;
    fs::write(root.join(MANIFEST_NAME), lines.join("\n") + "\n")
}
