//! Human and machine renderings of analysis results.
//!
//! Text output writes each invariant in the compact style
//! `{1<=i; i<=m; 1-i<=a; a<=i-1}`: every constraint is solved for its
//! lower-numbered variable, and equal lower and upper bounds collapse into
//! `=`. JSON output lists each constraint as `lhs op rhs` with `lhs` one of
//! `x`, `x + y` or `x - y`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::{AssertReport, InvariantMap};
use crate::lang::{render_guard, Location, Program};
use crate::numeric::Rational;
use crate::octagon::{to_constraints, OctConstraint, Octagon, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedConstraint {
    pub lhs: String,
    pub op: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationReport {
    pub location: String,
    pub bottom: bool,
    pub constraints: Vec<NamedConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertEntry {
    pub location: String,
    pub guard: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub variables: Vec<String>,
    pub locations: Vec<LocationReport>,
    pub asserts: Vec<AssertEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("malformed constraint `{0}`")]
    Malformed(String),
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Print invariants as stored instead of strongly closed.
    pub raw: bool,
    /// Attach the matrix dump of each invariant.
    pub matrix: bool,
    /// Restrict the location list to these (all when empty).
    pub only: Vec<Location>,
}

/// `x`, `x + y` or `x - y` with `x` the lower-numbered variable, together
/// with its range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Form {
    Unary(usize),
    Diff(usize, usize),
    Sum(usize, usize),
}

#[derive(Debug, Default)]
struct Range {
    lo: Option<Rational>,
    hi: Option<Rational>,
}

fn ranges(cs: &[OctConstraint]) -> BTreeMap<Form, Range> {
    use OctConstraint::*;
    let mut out: BTreeMap<Form, Range> = BTreeMap::new();
    for c in cs {
        let (form, lo, hi) = match c {
            UpperBound(VarId(i), c) => (Form::Unary(*i), None, Some(c.clone())),
            LowerBound(VarId(i), c) => (Form::Unary(*i), Some(c.clone()), None),
            DiffLeq(VarId(i), VarId(j), c) if i < j => (Form::Diff(*i, *j), None, Some(c.clone())),
            DiffLeq(VarId(i), VarId(j), c) => (Form::Diff(*j, *i), Some(-c), None),
            SumLeq(VarId(i), VarId(j), c) => {
                (Form::Sum(*i.min(j), *i.max(j)), None, Some(c.clone()))
            }
            NegSumLeq(VarId(i), VarId(j), c) => (Form::Sum(*i.min(j), *i.max(j)), Some(-c), None),
        };
        let r = out.entry(form).or_default();
        if lo.is_some() {
            r.lo = lo;
        }
        if hi.is_some() {
            r.hi = hi;
        }
    }
    out
}

/// Constraints of an octagon over named variables, for JSON output.
pub fn named_constraints(o: &Octagon, names: &[&str]) -> Vec<NamedConstraint> {
    let Some(m) = o.dbm() else { return vec![] };
    let mut out = Vec::new();
    for (form, r) in ranges(&to_constraints(m)) {
        let lhs = match form {
            Form::Unary(i) => names[i].to_string(),
            Form::Diff(i, j) => format!("{} - {}", names[i], names[j]),
            Form::Sum(i, j) => format!("{} + {}", names[i], names[j]),
        };
        if let Some(lo) = r.lo {
            out.push(NamedConstraint {
                lhs: lhs.clone(),
                op: ">=".into(),
                rhs: lo.to_string(),
            });
        }
        if let Some(hi) = r.hi {
            out.push(NamedConstraint {
                lhs,
                op: "<=".into(),
                rhs: hi.to_string(),
            });
        }
    }
    out
}

/// Inverse of [`named_constraints`] for a single entry.
pub fn parse_named(c: &NamedConstraint, names: &[&str]) -> Result<OctConstraint, ReportError> {
    let bad = || ReportError::Malformed(format!("{} {} {}", c.lhs, c.op, c.rhs));
    let var = |s: &str| {
        names
            .iter()
            .position(|n| *n == s.trim())
            .map(VarId)
            .ok_or_else(|| ReportError::UnknownVariable(s.trim().to_string()))
    };
    let rhs: Rational = c.rhs.parse().map_err(|_| bad())?;
    let upper = match c.op.as_str() {
        "<=" => true,
        ">=" => false,
        _ => return Err(bad()),
    };
    Ok(if let Some((x, y)) = c.lhs.split_once(" + ") {
        let (x, y) = (var(x)?, var(y)?);
        if upper {
            OctConstraint::SumLeq(x, y, rhs)
        } else {
            OctConstraint::NegSumLeq(x, y, -rhs)
        }
    } else if let Some((x, y)) = c.lhs.split_once(" - ") {
        let (x, y) = (var(x)?, var(y)?);
        if upper {
            OctConstraint::DiffLeq(x, y, rhs)
        } else {
            OctConstraint::DiffLeq(y, x, -rhs)
        }
    } else {
        let x = var(&c.lhs)?;
        if upper {
            OctConstraint::UpperBound(x, rhs)
        } else {
            OctConstraint::LowerBound(x, rhs)
        }
    })
}

/// `y + k` or `k - y`, written compactly.
fn affine(y: &str, negated: bool, k: &Rational) -> String {
    match (negated, k.is_zero()) {
        (false, true) => y.to_string(),
        (false, false) if k.is_negative() => format!("{y}-{}", -k),
        (false, false) => format!("{y}+{k}"),
        (true, true) => format!("-{y}"),
        (true, false) => format!("{k}-{y}"),
    }
}

type Renderer<'a> = Box<dyn Fn(&Rational) -> String + 'a>;

/// The invariant as `{c1; c2; ...}`, or `bottom`. Per variable pair, lower
/// bounds on the subject come before upper bounds.
pub fn render_invariant(o: &Octagon, names: &[&str]) -> String {
    let Some(m) = o.dbm() else {
        return "bottom".into();
    };
    let mut groups: BTreeMap<(usize, usize), (Vec<String>, Vec<String>)> = BTreeMap::new();
    for (form, r) in ranges(&to_constraints(m)) {
        let (key, x, bound): (_, &str, Renderer) = match form {
            Form::Unary(i) => (
                (i, usize::MAX),
                names[i],
                Box::new(|k: &Rational| k.to_string()),
            ),
            Form::Diff(i, j) => (
                (i, j),
                names[i],
                Box::new(move |k: &Rational| affine(names[j], false, k)),
            ),
            Form::Sum(i, j) => (
                (i, j),
                names[i],
                Box::new(move |k: &Rational| affine(names[j], true, k)),
            ),
        };
        let (lower, upper) = groups.entry(key).or_default();
        match (&r.lo, &r.hi) {
            (Some(lo), Some(hi)) if lo == hi => lower.push(format!("{x} = {}", bound(lo))),
            (lo, hi) => {
                if let Some(lo) = lo {
                    lower.push(format!("{}<={x}", bound(lo)));
                }
                if let Some(hi) = hi {
                    upper.push(format!("{x}<={}", bound(hi)));
                }
            }
        }
    }
    // unary bounds first, then pairs
    let (unary, binary): (Vec<_>, Vec<_>) =
        groups.into_iter().partition(|((_, j), _)| *j == usize::MAX);
    let parts: Vec<String> = unary
        .into_iter()
        .chain(binary)
        .flat_map(|(_, (lower, upper))| lower.into_iter().chain(upper))
        .collect();
    format!("{{{}}}", parts.join("; "))
}

/// Collects everything the front end prints.
pub fn build_report(
    p: &Program,
    inv: &InvariantMap,
    asserts: &[AssertReport],
    opts: &ReportOptions,
) -> Report {
    let names = p.var_names();
    let locations = p
        .locations()
        .filter(|l| opts.only.is_empty() || opts.only.contains(l))
        .map(|l| {
            let o = if opts.raw {
                inv.get(l).clone()
            } else {
                inv.closed(l)
            };
            LocationReport {
                location: l.to_string(),
                bottom: o.is_bottom(),
                constraints: named_constraints(&o, &names),
                matrix: opts.matrix.then(|| match inv.get(l) {
                    Octagon::Bottom => "bottom".to_string(),
                    Octagon::NonBottom(m) => m.matrix().dump(),
                }),
            }
        })
        .collect();
    let asserts = asserts
        .iter()
        .map(|a| AssertEntry {
            location: a.location.to_string(),
            guard: render_guard(&a.guard, &names),
            status: match a.verdict {
                crate::analyzer::Verdict::Proved => "proved".into(),
                crate::analyzer::Verdict::Unknown => "unknown".into(),
            },
        })
        .collect();
    Report {
        variables: names.iter().map(|s| s.to_string()).collect(),
        locations,
        asserts,
    }
}

/// Text report: one line per location, then one per assertion.
pub fn render_text(
    p: &Program,
    inv: &InvariantMap,
    report: &Report,
    opts: &ReportOptions,
) -> String {
    let names = p.var_names();
    let mut out = String::new();
    for loc in &report.locations {
        let l: Location = loc.location.parse().expect("rendered location");
        let o = if opts.raw {
            inv.get(l).clone()
        } else {
            inv.closed(l)
        };
        out.push_str(&format!(
            "{}: {}\n",
            loc.location,
            render_invariant(&o, &names)
        ));
        if let Some(m) = &loc.matrix {
            for line in m.lines() {
                out.push_str(&format!("    {line}\n"));
            }
        }
    }
    for a in &report.asserts {
        out.push_str(&format!(
            "assert {} at {}: {}\n",
            a.guard, a.location, a.status
        ));
    }
    out
}
