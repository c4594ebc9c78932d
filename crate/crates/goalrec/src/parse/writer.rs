//! Canonical serialization of domains and problems.
//!
//! Output is deterministic: literal sets print in sorted order and empty
//! blocks are omitted, so structurally equal models serialize to identical
//! bytes.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::model::{Fact, IncompleteDomain, Literal, Parameter, TypedObject, ROOT_TYPE};
use crate::parse::ProblemFile;

fn write_parameters(out: &mut String, params: &[Parameter]) {
    let mut first = true;
    for p in params {
        if !first {
            out.push(' ');
        }
        first = false;
        out.push_str(&p.variable);
        if p.type_name != ROOT_TYPE {
            write!(out, " - {}", p.type_name).unwrap();
        }
    }
}

fn write_literal_block(
    out: &mut String,
    keyword: &str,
    literals: &BTreeSet<Literal>,
    negated: bool,
) {
    if literals.is_empty() {
        return;
    }
    write!(out, "\n    {keyword} (and").unwrap();
    for l in literals {
        if negated {
            write!(out, " (not {l})").unwrap();
        } else {
            write!(out, " {l}").unwrap();
        }
    }
    out.push(')');
}

/// Serializes a domain in the annotated grammar accepted by
/// [`crate::parse::parse_domain`].
pub fn serialize_domain(domain: &IncompleteDomain) -> String {
    let mut out = String::new();
    writeln!(out, "(define (domain {})", domain.name).unwrap();
    let typing = if domain.types.is_empty() {
        ""
    } else {
        " :typing"
    };
    writeln!(out, "  (:requirements :strips{typing})").unwrap();
    if !domain.types.is_empty() {
        out.push_str("  (:types");
        for (child, parent) in domain.types.iter() {
            write!(out, " {child} - {parent}").unwrap();
        }
        out.push_str(")\n");
    }
    out.push_str("  (:predicates");
    for p in &domain.predicates {
        write!(out, "\n    ({}", p.name).unwrap();
        if !p.parameters.is_empty() {
            out.push(' ');
            write_parameters(&mut out, &p.parameters);
        }
        out.push(')');
    }
    out.push_str(")\n");
    for op in &domain.operators {
        write!(out, "  (:action {}\n    :parameters (", op.name).unwrap();
        write_parameters(&mut out, &op.parameters);
        out.push(')');
        write_literal_block(&mut out, ":precondition", &op.pre, false);
        write_literal_block(&mut out, ":poss-precondition", &op.poss_pre, false);
        if !op.add.is_empty() || !op.del.is_empty() {
            out.push_str("\n    :effect (and");
            for l in &op.add {
                write!(out, " {l}").unwrap();
            }
            for l in &op.del {
                write!(out, " (not {l})").unwrap();
            }
            out.push(')');
        }
        write_literal_block(&mut out, ":poss-effect-add", &op.poss_add, false);
        write_literal_block(&mut out, ":poss-effect-del", &op.poss_del, false);
        out.push_str(")\n");
    }
    out.push_str(")\n");
    out
}

/// Serializes the classical projection: all incompleteness annotations are
/// dropped, leaving a plain STRIPS file.
pub fn serialize_domain_stripped(domain: &IncompleteDomain) -> String {
    serialize_domain(&domain.stripped())
}

/// Serializes a problem file (objects, init, goal).
pub fn serialize_problem(problem: &ProblemFile) -> String {
    let mut out = String::new();
    writeln!(out, "(define (problem {})", problem.name).unwrap();
    writeln!(out, "  (:domain {})", problem.domain_name).unwrap();
    if !problem.objects.is_empty() {
        out.push_str("  (:objects");
        for TypedObject { name, type_name } in &problem.objects {
            if type_name == ROOT_TYPE {
                write!(out, " {name}").unwrap();
            } else {
                write!(out, " {name} - {type_name}").unwrap();
            }
        }
        out.push_str(")\n");
    }
    out.push_str("  (:init");
    for f in &problem.init {
        write!(out, " {f}").unwrap();
    }
    out.push_str(")\n");
    out.push_str("  (:goal (and");
    for f in &problem.goal {
        write!(out, " {f}").unwrap();
    }
    out.push_str(")))\n");
    out
}

/// Renders a goal as the single-line hypotheses syntax.
pub fn goal_line(goal: &BTreeSet<Fact>) -> String {
    let mut out = String::from("(and");
    for f in goal {
        write!(out, " {f}").unwrap();
    }
    out.push(')');
    out
}
