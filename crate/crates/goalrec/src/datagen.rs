//! Reproducible degradation of complete STRIPS domains into incomplete ones.
//!
//! Three cumulative steps, all driven by a ChaCha8 stream seeded from a
//! 64-bit seed so outputs are identical across platforms:
//!
//! 1. move `ceil(percent/100 * total)` known literal occurrences per category
//!    (preconditions, add effects, delete effects, counted across all
//!    operators) into the matching possible list;
//! 2. for each operator, add each delete-effect literal that is not a
//!    precondition to the possible preconditions with probability
//!    `percent/100`;
//! 3. for each operator, add each declarable literal that fits the operator
//!    signature and is not a known precondition or effect to one
//!    uniformly-chosen possible list with probability `percent/100`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{IncompleteDomain, Literal, LiteralCategory};
use crate::parse::serialize_domain;

/// Which degradation steps apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DegradeVariant {
    /// Step 1 only.
    S1,
    /// Steps 1 and 2.
    S12,
    /// Steps 1, 2, and 3.
    S123,
}

impl DegradeVariant {
    pub const ALL: [DegradeVariant; 3] = [
        DegradeVariant::S1,
        DegradeVariant::S12,
        DegradeVariant::S123,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            DegradeVariant::S1 => "s1",
            DegradeVariant::S12 => "s12",
            DegradeVariant::S123 => "s123",
        }
    }
}

impl std::fmt::Display for DegradeVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegradeSpec {
    /// Incompleteness percentage in `[0, 100]`.
    pub percent: u32,
    pub seed: u64,
    pub variant: DegradeVariant,
}

#[derive(Debug, Error)]
pub enum DegradeError {
    #[error("percent {0} is out of range (expected 0..=100)")]
    PercentOutOfRange(u32),
    #[error("input domain already has possible sets (expected a complete domain)")]
    NotComplete,
}

/// Degrades a complete domain at the requested incompleteness percentage.
/// Deterministic for a fixed `(domain, spec)` pair.
pub fn degrade(
    domain: &IncompleteDomain,
    spec: &DegradeSpec,
) -> Result<IncompleteDomain, DegradeError> {
    if spec.percent > 100 {
        return Err(DegradeError::PercentOutOfRange(spec.percent));
    }
    if !domain.is_complete() {
        return Err(DegradeError::NotComplete);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = domain.clone();
    let rate = spec.percent as f64 / 100.0;

    step1_move_known_literals(&mut out, spec.percent, &mut rng);
    if matches!(spec.variant, DegradeVariant::S12 | DegradeVariant::S123) {
        step2_deletes_to_possible_preconditions(&mut out, rate, &mut rng);
    }
    if matches!(spec.variant, DegradeVariant::S123) {
        step3_fitting_literals_to_possible_lists(&mut out, rate, &mut rng);
    }
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

/// Step 1: occurrence-level selection across the whole domain, exactly
/// `ceil(percent/100 * total)` moves per category.
fn step1_move_known_literals(domain: &mut IncompleteDomain, percent: u32, rng: &mut ChaCha8Rng) {
    for category in LiteralCategory::ALL {
        let mut occurrences: Vec<(usize, Literal)> = Vec::new();
        for (i, op) in domain.operators.iter().enumerate() {
            for lit in op.known_set(category) {
                occurrences.push((i, lit.clone()));
            }
        }
        let total = occurrences.len();
        let moved = ceil_fraction(total, percent);
        let chosen = choose_indices(total, moved, rng);
        for idx in chosen {
            let (op_index, lit) = occurrences[idx].clone();
            let op = &mut domain.operators[op_index];
            op.known_set_mut(category).remove(&lit);
            op.possible_set_mut(category).insert(lit);
        }
    }
}

/// Step 2: delete effects that are not preconditions become possible
/// preconditions with probability `rate`. Delete-effect literals are read
/// across both the known and possible delete lists (step 1 may have moved
/// some), and candidates already required or possibly required are skipped.
fn step2_deletes_to_possible_preconditions(
    domain: &mut IncompleteDomain,
    rate: f64,
    rng: &mut ChaCha8Rng,
) {
    for op in &mut domain.operators {
        let candidates: Vec<Literal> = op
            .del
            .union(&op.poss_del)
            .filter(|l| !op.pre.contains(*l) && !op.poss_pre.contains(*l))
            .cloned()
            .collect();
        for lit in candidates {
            if rng.gen_bool(rate) {
                op.poss_pre.insert(lit);
            }
        }
    }
}

/// Step 3: every declarable literal whose parameters fit the operator
/// signature and which is not a known precondition or effect joins one
/// uniformly-chosen possible list with probability `rate`.
fn step3_fitting_literals_to_possible_lists(
    domain: &mut IncompleteDomain,
    rate: f64,
    rng: &mut ChaCha8Rng,
) {
    let predicates = domain.predicates.clone();
    let types = domain.types.clone();
    for op in &mut domain.operators {
        let mut candidates: Vec<Literal> = Vec::new();
        for schema in &predicates {
            let slots: Vec<Vec<&str>> = schema
                .parameters
                .iter()
                .map(|pp| {
                    op.parameters
                        .iter()
                        .filter(|opp| types.is_subtype(&opp.type_name, &pp.type_name))
                        .map(|opp| opp.variable.as_str())
                        .collect::<Vec<_>>()
                })
                .collect();
            if slots.iter().any(|s| s.is_empty()) {
                continue;
            }
            let mut odometer = vec![0usize; slots.len()];
            loop {
                let args: Vec<String> = odometer
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| slots[i][d].to_string())
                    .collect();
                let lit = Literal::new(schema.name.clone(), args);
                if !op.pre.contains(&lit) && !op.add.contains(&lit) && !op.del.contains(&lit) {
                    candidates.push(lit);
                }
                if slots.is_empty() {
                    break;
                }
                let mut i = slots.len();
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    odometer[i] += 1;
                    if odometer[i] < slots[i].len() {
                        done = false;
                        break;
                    }
                    odometer[i] = 0;
                }
                if done {
                    break;
                }
            }
        }
        for lit in candidates {
            if rng.gen_bool(rate) {
                let target = match rng.gen_range(0..3u8) {
                    0 => LiteralCategory::Precondition,
                    1 => LiteralCategory::AddEffect,
                    _ => LiteralCategory::DelEffect,
                };
                op.possible_set_mut(target).insert(lit);
            }
        }
    }
}

fn ceil_fraction(total: usize, percent: u32) -> usize {
    ((total as u64 * percent as u64).div_ceil(100)) as usize
}

/// First `count` positions of a seeded partial Fisher-Yates shuffle over
/// `0..total`; consumes exactly `count` draws.
fn choose_indices(total: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..total).collect();
    let count = count.min(total);
    for i in 0..count {
        let j = rng.gen_range(i..total);
        indices.swap(i, j);
    }
    indices.truncate(count);
    indices
}

/// Emits one degraded file per `(percent, variant)` combination under
/// `out_dir`, named `<domain>-incomplete-<percent>-<variant>.pddl`. Extra
/// seeds beyond the first produce additional draws suffixed `-d<k>`.
pub fn degrade_suite(
    domain: &IncompleteDomain,
    seeds: &[u64],
    percents: &[u32],
    out_dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for &percent in percents {
        for variant in DegradeVariant::ALL {
            for (draw, &seed) in seeds.iter().enumerate() {
                let spec = DegradeSpec {
                    percent,
                    seed,
                    variant,
                };
                let degraded = degrade(domain, &spec)
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
                let suffix = if draw == 0 {
                    String::new()
                } else {
                    format!("-d{draw}")
                };
                let file = out_dir.join(format!(
                    "{}-incomplete-{}-{}{}.pddl",
                    domain.name, percent, variant, suffix
                ));
                fs::write(&file, serialize_domain(&degraded))?;
                paths.push(file);
            }
        }
    }
    Ok(paths)
}
