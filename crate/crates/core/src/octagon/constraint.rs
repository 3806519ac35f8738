use std::fmt;
use std::str::FromStr;

use crate::numeric::{Bound, Rational};

use super::{bar, CoherentDbm, OctError, VarId};

/// One octagonal constraint in source form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OctConstraint {
    /// `v_i + v_j <= c`
    SumLeq(VarId, VarId, Rational),
    /// `v_i - v_j <= c`
    DiffLeq(VarId, VarId, Rational),
    /// `-v_i - v_j <= c`
    NegSumLeq(VarId, VarId, Rational),
    /// `v_i <= c`
    UpperBound(VarId, Rational),
    /// `v_i >= c`
    LowerBound(VarId, Rational),
}

impl OctConstraint {
    fn vars(&self) -> (VarId, Option<VarId>) {
        use OctConstraint::*;
        match self {
            SumLeq(i, j, _) | DiffLeq(i, j, _) | NegSumLeq(i, j, _) => (*i, Some(*j)),
            UpperBound(i, _) | LowerBound(i, _) => (*i, None),
        }
    }

    /// The matrix cell `(r, s)` and value encoding this constraint; the
    /// coherent twin is `(bar s, bar r)`.
    pub(super) fn cell(&self) -> (usize, usize, Rational) {
        use OctConstraint::*;
        match self {
            SumLeq(i, j, c) => (j.neg(), i.pos(), c.clone()),
            DiffLeq(i, j, c) => (j.pos(), i.pos(), c.clone()),
            NegSumLeq(i, j, c) => (i.pos(), j.neg(), c.clone()),
            UpperBound(i, c) => (i.neg(), i.pos(), c + c),
            LowerBound(i, c) => (i.pos(), i.neg(), -(c + c)),
        }
    }

    /// Decodes the entry `[r][s] = c`, i.e. `v'_s - v'_r <= c`.
    fn from_cell(r: usize, s: usize, c: &Rational) -> OctConstraint {
        use OctConstraint::*;
        let (x, y) = (VarId(s / 2), VarId(r / 2));
        let x_pos = s.is_multiple_of(2);
        let y_pos = r % 2 == 1;
        if x == y {
            return if x_pos {
                UpperBound(x, c.half())
            } else {
                LowerBound(x, -c.half())
            };
        }
        let (lo, hi) = (x.min(y), x.max(y));
        match (x_pos, y_pos) {
            (true, true) => SumLeq(lo, hi, c.clone()),
            (false, false) => NegSumLeq(lo, hi, c.clone()),
            (true, false) => DiffLeq(x, y, c.clone()),
            (false, true) => DiffLeq(y, x, c.clone()),
        }
    }

    fn sort_key(&self) -> (u8, usize, usize, u8) {
        use OctConstraint::*;
        match self {
            UpperBound(i, _) => (0, i.0, 0, 0),
            LowerBound(i, _) => (0, i.0, 0, 1),
            DiffLeq(i, j, _) => (1, i.0.min(j.0), i.0.max(j.0), if i < j { 0 } else { 1 }),
            SumLeq(i, j, _) => (1, i.0.min(j.0), i.0.max(j.0), 2),
            NegSumLeq(i, j, _) => (1, i.0.min(j.0), i.0.max(j.0), 3),
        }
    }
}

impl fmt::Display for OctConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use OctConstraint::*;
        match self {
            SumLeq(i, j, c) => write!(f, "{i} + {j} <= {c}"),
            DiffLeq(i, j, c) => write!(f, "{i} - {j} <= {c}"),
            NegSumLeq(i, j, c) => write!(f, "-{i} - {j} <= {c}"),
            UpperBound(i, c) => write!(f, "{i} <= {c}"),
            LowerBound(i, c) => write!(f, "{i} >= {c}"),
        }
    }
}

fn parse_var(tok: &str) -> Option<VarId> {
    tok.strip_prefix('v')?.parse().ok().map(VarId)
}

impl FromStr for OctConstraint {
    type Err = OctError;

    /// Accepts `[-]v<i> [+|-] v<j> <= c`, `v<i> <= c` and `v<i> >= c`.
    fn from_str(s: &str) -> Result<Self, OctError> {
        let bad = || OctError::Parse(s.trim().to_string());
        let (lhs, rhs, upper) = if let Some((l, r)) = s.split_once("<=") {
            (l, r, true)
        } else if let Some((l, r)) = s.split_once(">=") {
            (l, r, false)
        } else {
            return Err(bad());
        };
        let c: Rational = rhs.trim().parse().map_err(|_| bad())?;
        let lhs = lhs.replace(' ', "");
        let (first_neg, rest) = match lhs.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, lhs.as_str()),
        };
        let split = rest.find(['+', '-']);
        let Some(at) = split else {
            let v = parse_var(rest).ok_or_else(bad)?;
            return Ok(match (first_neg, upper) {
                (false, true) => OctConstraint::UpperBound(v, c),
                (false, false) => OctConstraint::LowerBound(v, c),
                (true, true) => OctConstraint::LowerBound(v, -c),
                (true, false) => OctConstraint::UpperBound(v, -c),
            });
        };
        if !upper {
            return Err(bad());
        }
        let x = parse_var(&rest[..at]).ok_or_else(bad)?;
        let second_neg = &rest[at..at + 1] == "-";
        let y = parse_var(&rest[at + 1..]).ok_or_else(bad)?;
        if x == y {
            return Err(OctError::SameVariable(x.0));
        }
        Ok(match (first_neg, second_neg) {
            (false, false) => OctConstraint::SumLeq(x, y, c),
            (false, true) => OctConstraint::DiffLeq(x, y, c),
            (true, false) => OctConstraint::DiffLeq(y, x, c),
            (true, true) => OctConstraint::NegSumLeq(x, y, c),
        })
    }
}

/// Builds the coherent matrix of a conjunction of constraints; repeated
/// constraints on the same cell keep the tightest bound.
pub fn from_constraints(n_vars: usize, cs: &[OctConstraint]) -> Result<CoherentDbm, OctError> {
    let mut m = CoherentDbm::top(n_vars);
    for c in cs {
        let (x, y) = c.vars();
        for v in std::iter::once(x).chain(y) {
            if v.0 >= n_vars {
                return Err(OctError::VarOutOfRange(v.0, n_vars));
            }
        }
        if y == Some(x) {
            return Err(OctError::SameVariable(x.0));
        }
        let (r, s, value) = c.cell();
        m.tighten(r, s, Bound::Finite(value));
    }
    Ok(m)
}

/// One constraint per finite off-diagonal entry, twins merged, in a stable
/// order: unary bounds first, then binary ones by variable pair.
pub fn to_constraints(m: &CoherentDbm) -> Vec<OctConstraint> {
    let mut out: Vec<OctConstraint> = m
        .matrix()
        .arcs()
        .filter(|&(r, s, _)| r != s && (r, s) <= (bar(s), bar(r)))
        .map(|(r, s, b)| OctConstraint::from_cell(r, s, b.finite().expect("arc is finite")))
        .collect();
    out.sort_by_key(OctConstraint::sort_key);
    out
}

/// Parses the line-oriented constraint form; blank lines and `#` comments
/// are skipped.
pub fn parse_constraints(text: &str) -> Result<Vec<OctConstraint>, OctError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

pub fn render_constraints(cs: &[OctConstraint]) -> String {
    cs.iter().map(|c| format!("{c}\n")).collect()
}
