//! Forward abstract execution over the octagon domain.
//!
//! Every location starts at `⊥` except the entry, which starts at `⊤`.
//! Assignments and tests use the transfer functions, branches merge with the
//! join of their strong closures, and loops are stabilized at their head
//! with widening:
//!
//! ```text
//! head_0     = close(guard(close(entry), g))
//! head_{n+1} = head_n ▽ guard(close(body_end_n), g)      until head_{n+1} = head_n
//! exit       = guard(close(entry), ¬g) ⊔ guard(close(body_end), ¬g)
//! ```
//!
//! Loop heads are kept exactly as returned by widening and only closed on
//! copies.

use serde::Serialize;

use crate::lang::{Block, Guard, Location, Program, Stmt, StmtKind};
use crate::octagon::{assign, entails, guard_with, join, widen_octagon, Numerics, Octagon};

/// The invariant computed for each location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantMap {
    states: Vec<Octagon>,
}

impl InvariantMap {
    /// The stored value, not necessarily closed.
    pub fn get(&self, l: Location) -> &Octagon {
        &self.states[l.0]
    }

    /// The strongly closed invariant at `l`.
    pub fn closed(&self, l: Location) -> Octagon {
        self.states[l.0].closed()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Location, &Octagon)> {
        self.states
            .iter()
            .enumerate()
            .map(|(k, o)| (Location(k), o))
    }
}

/// How one loop stabilization went.
#[derive(Debug, Clone)]
pub struct LoopReport {
    /// First location of the loop body, where the head invariant lives.
    pub head: Location,
    /// Every computed head value, the last one equal to its predecessor.
    pub heads: Vec<Octagon>,
    /// Invariants of the body locations after each pass, indexed from
    /// `head`.
    pub passes: Vec<Vec<Octagon>>,
}

impl LoopReport {
    /// Number of head values computed, counting the one that repeated.
    pub fn iterations(&self) -> usize {
        self.heads.len()
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub invariants: InvariantMap,
    /// One entry per loop stabilization, inner loops once per outer pass.
    pub loops: Vec<LoopReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Proved,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertReport {
    /// Location just before the assertion.
    pub location: Location,
    pub guard: Guard,
    pub verdict: Verdict,
}

struct Analyzer {
    int_vars: Vec<bool>,
    states: Vec<Octagon>,
    loops: Vec<LoopReport>,
}

impl Analyzer {
    fn num(&self) -> Numerics<'_> {
        Numerics::with_int_vars(&self.int_vars)
    }

    fn guard(&self, m: &Octagon, g: &Guard) -> Octagon {
        guard_with(m, g, self.num())
    }

    fn block(&mut self, b: &Block, entry: Octagon) -> Octagon {
        self.states[b.start.0] = entry.clone();
        let mut cur = entry;
        for stmt in &b.stmts {
            cur = self.stmt(stmt, cur);
            if let Some(l) = stmt.after {
                self.states[l.0] = cur.clone();
            }
        }
        cur
    }

    fn stmt(&mut self, stmt: &Stmt, cur: Octagon) -> Octagon {
        match &stmt.kind {
            StmtKind::Assign(v, e) => assign(&cur, *v, e),
            StmtKind::Assert(g) | StmtKind::Assume(g) => self.guard(&cur, g),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let t_in = self.guard(&cur, cond);
                let e_in = self.guard(&cur, &cond.negate());
                let t = self.block(then_branch, t_in);
                let e = self.block(else_branch, e_in);
                join(&t, &e).expect("same variables")
            }
            StmtKind::While { cond, body } => {
                let after = stmt.after.expect("loops carry a location");
                self.stabilize(cond, body, after, cur)
            }
        }
    }

    fn stabilize(
        &mut self,
        cond: &Guard,
        body: &Block,
        after: Location,
        entry: Octagon,
    ) -> Octagon {
        let entry = entry.closed();
        let span = body.start.0..after.0;
        let mut head = self.guard(&entry, cond).closed();
        let mut report = LoopReport {
            head: body.start,
            heads: vec![head.clone()],
            passes: vec![],
        };
        let end = loop {
            let end = self.block(body, head.clone());
            report.passes.push(self.states[span.clone()].to_vec());
            let next =
                widen_octagon(&head, &self.guard(&end.closed(), cond)).expect("same variables");
            report.heads.push(next.clone());
            if next == head {
                break end;
            }
            head = next;
        };
        self.loops.push(report);
        let neg = cond.negate();
        join(&self.guard(&entry, &neg), &self.guard(&end.closed(), &neg)).expect("same variables")
    }

    fn asserts(&self, b: &Block, out: &mut Vec<AssertReport>) {
        let mut here = b.start;
        for stmt in &b.stmts {
            match &stmt.kind {
                StmtKind::Assert(g) => {
                    let inv = &self.states[here.0];
                    let refuted = self.guard(&inv.closed(), &g.negate()).is_bottom();
                    let verdict = if refuted || entails(inv, g, self.num()) {
                        Verdict::Proved
                    } else {
                        Verdict::Unknown
                    };
                    out.push(AssertReport {
                        location: here,
                        guard: g.clone(),
                        verdict,
                    });
                }
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    self.asserts(then_branch, out);
                    self.asserts(else_branch, out);
                }
                StmtKind::While { body, .. } => self.asserts(body, out),
                _ => {}
            }
            if let Some(l) = stmt.after {
                here = l;
            }
        }
    }
}

/// Runs the analysis and keeps the per-loop history.
pub fn analyze_traced(p: &Program) -> Analysis {
    let mut a = Analyzer {
        int_vars: p.int_vars(),
        states: vec![Octagon::Bottom; p.n_locations],
        loops: Vec::new(),
    };
    a.block(&p.body, Octagon::top(p.n_vars()));
    Analysis {
        invariants: InvariantMap { states: a.states },
        loops: a.loops,
    }
}

/// An invariant for every location of `p`.
pub fn analyze(p: &Program) -> InvariantMap {
    analyze_traced(p).invariants
}

/// Verdicts for the `assert` statements of `p`, in source order. An
/// assertion is proved when its negation is unsatisfiable under the
/// invariant before it, or when the invariant implies it.
pub fn check_asserts(p: &Program, inv: &InvariantMap) -> Vec<AssertReport> {
    let a = Analyzer {
        int_vars: p.int_vars(),
        states: inv.states.clone(),
        loops: vec![],
    };
    let mut out = Vec::new();
    a.asserts(&p.body, &mut out);
    out
}
