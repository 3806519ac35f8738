//! Guards, assignments and interval evaluation.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::lang::{CmpOp, Expr, Guard, Linear};
use crate::numeric::{Bound, Interval, Rational};

use super::closure::strong_closure;
use super::{bar, is_empty, join, meet, CoherentDbm, OctConstraint, OctError, Octagon, VarId};

/// Which variables range over the integers. Variables not listed are
/// rational.
#[derive(Debug, Clone, Copy, Default)]
pub struct Numerics<'a> {
    int_vars: &'a [bool],
}

impl<'a> Numerics<'a> {
    pub fn rational() -> Self {
        Numerics { int_vars: &[] }
    }

    pub fn with_int_vars(int_vars: &'a [bool]) -> Self {
        Numerics { int_vars }
    }

    fn is_int(&self, v: VarId) -> bool {
        self.int_vars.get(v.0).copied().unwrap_or(false)
    }
}

/// Restricts `m` to the states satisfying `g`, with every variable rational.
pub fn guard(m: &Octagon, g: &Guard) -> Octagon {
    guard_with(m, g, Numerics::rational())
}

/// [`guard`] where atoms over integer variables with integer coefficients
/// are tightened before translation: `e < c` becomes `e <= ceil(c) - 1`,
/// `e <= c` becomes `e <= floor(c)` and `e != c` splits in two.
pub fn guard_with(m: &Octagon, g: &Guard, num: Numerics<'_>) -> Octagon {
    if matches!(m, Octagon::Bottom) {
        return Octagon::Bottom;
    }
    match g {
        Guard::NonDet => m.clone(),
        Guard::Atom(l, op, r) => guard_atom(m, l, *op, r, num),
        Guard::And(a, b) => {
            meet(&guard_with(m, a, num), &guard_with(m, b, num)).expect("same variables")
        }
        Guard::Or(a, b) => {
            join(&guard_with(m, a, num), &guard_with(m, b, num)).expect("same variables")
        }
        Guard::Not(inner) => guard_with(m, &inner.negate(), num),
    }
}

/// `lhs <= bound`, or `lhs < bound` when `strict`; `lhs` has no constant.
#[derive(Debug, Clone)]
struct Ineq {
    lhs: Linear,
    bound: Rational,
    strict: bool,
}

enum AtomForm {
    Const(bool),
    /// Involves `rand` or an opaque operation.
    Unknown,
    All(Vec<Ineq>),
    Either(Ineq, Ineq),
}

fn atom_form(l: &Expr, op: CmpOp, r: &Expr, num: Numerics<'_>) -> AtomForm {
    let Some(diff) = Expr::sub(l.clone(), r.clone()).linearize() else {
        return AtomForm::Unknown;
    };
    let c = -&diff.constant;
    let lhs = Linear {
        coeffs: diff.coeffs,
        constant: Rational::ZERO,
    };
    if lhs.coeffs.is_empty() {
        return AtomForm::Const(op.eval(&Rational::ZERO, &c));
    }
    let integral = lhs
        .coeffs
        .iter()
        .all(|(v, k)| num.is_int(*v) && k.is_integer());
    let ineq = |l: &Linear, c: &Rational, strict: bool| -> Ineq {
        if !integral {
            return Ineq {
                lhs: l.clone(),
                bound: c.clone(),
                strict,
            };
        }
        let g = l
            .coeffs
            .values()
            .map(|k| k.numer().abs())
            .reduce(|a, b| a.gcd(&b))
            .and_then(|g| g.to_i64())
            .map(Rational::integer)
            .unwrap_or(Rational::ONE);
        let inv = g.recip().expect("gcd of nonzero coefficients");
        let c = c * &inv;
        let bound = if strict {
            &c.ceil() - &Rational::ONE
        } else {
            c.floor()
        };
        Ineq {
            lhs: l.clone().scale(&inv),
            bound,
            strict: false,
        }
    };
    let neg = lhs.clone().scale(&-Rational::ONE);
    let minus_c = -&c;
    match op {
        CmpOp::Le => AtomForm::All(vec![ineq(&lhs, &c, false)]),
        CmpOp::Lt => AtomForm::All(vec![ineq(&lhs, &c, true)]),
        CmpOp::Ge => AtomForm::All(vec![ineq(&neg, &minus_c, false)]),
        CmpOp::Gt => AtomForm::All(vec![ineq(&neg, &minus_c, true)]),
        CmpOp::Eq => AtomForm::All(vec![ineq(&lhs, &c, false), ineq(&neg, &minus_c, false)]),
        CmpOp::Ne => AtomForm::Either(ineq(&lhs, &c, true), ineq(&neg, &minus_c, true)),
    }
}

/// Matches `lhs <= bound` against the octagonal shapes.
fn as_octagonal(ineq: &Ineq) -> Option<OctConstraint> {
    let (l, c) = (&ineq.lhs, &ineq.bound);
    let one = Rational::ONE;
    let minus_one = -Rational::ONE;
    let two = Rational::integer(2);
    let unit = |k: &Rational| *k == one || *k == minus_one;
    let terms: Vec<(VarId, &Rational)> = l.coeffs.iter().map(|(v, k)| (*v, k)).collect();
    Some(match terms.as_slice() {
        [(v, k)] if **k == one => OctConstraint::UpperBound(*v, c.clone()),
        [(v, k)] if **k == minus_one => OctConstraint::LowerBound(*v, -c),
        [(v, k)] if **k == two => OctConstraint::UpperBound(*v, c.half()),
        [(v, k)] if **k == -&two => OctConstraint::LowerBound(*v, -c.half()),
        [(x, a), (y, b)] if unit(a) && unit(b) => match (a.is_positive(), b.is_positive()) {
            (true, true) => OctConstraint::SumLeq(*x, *y, c.clone()),
            (true, false) => OctConstraint::DiffLeq(*x, *y, c.clone()),
            (false, true) => OctConstraint::DiffLeq(*y, *x, c.clone()),
            (false, false) => OctConstraint::NegSumLeq(*x, *y, c.clone()),
        },
        _ => return None,
    })
}

/// Meets `m` with the octagonal inequalities, strictness dropped; other
/// shapes are ignored.
fn install(m: &CoherentDbm, cs: &[Ineq]) -> Octagon {
    let mut out = m.clone();
    for c in cs.iter().filter_map(as_octagonal) {
        let (r, s, value) = c.cell();
        out.tighten(r, s, Bound::Finite(value));
    }
    if is_empty(&out) {
        Octagon::Bottom
    } else {
        Octagon::NonBottom(out)
    }
}

fn guard_atom(m: &Octagon, l: &Expr, op: CmpOp, r: &Expr, num: Numerics<'_>) -> Octagon {
    let Octagon::NonBottom(dbm) = m else {
        return Octagon::Bottom;
    };
    match atom_form(l, op, r, num) {
        AtomForm::Const(true) | AtomForm::Unknown => m.clone(),
        AtomForm::Const(false) => Octagon::Bottom,
        AtomForm::All(cs) => install(dbm, &cs),
        AtomForm::Either(a, b) => {
            join(&install(dbm, &[a]), &install(dbm, &[b])).expect("same variables")
        }
    }
}

/// Whether every state of `m` satisfies `g`. Sound but incomplete: a
/// `false` answer means "not shown".
pub fn entails(m: &Octagon, g: &Guard, num: Numerics<'_>) -> bool {
    match m.closed() {
        Octagon::Bottom => true,
        Octagon::NonBottom(s) => entails_closed(&s, g, num),
    }
}

fn entails_closed(s: &CoherentDbm, g: &Guard, num: Numerics<'_>) -> bool {
    match g {
        Guard::NonDet => false,
        Guard::And(a, b) => entails_closed(s, a, num) && entails_closed(s, b, num),
        Guard::Or(a, b) => entails_closed(s, a, num) || entails_closed(s, b, num),
        Guard::Not(inner) => entails_closed(s, &inner.negate(), num),
        Guard::Atom(l, op, r) => match atom_form(l, *op, r, num) {
            AtomForm::Const(b) => b,
            AtomForm::Unknown => false,
            AtomForm::All(cs) => cs.iter().all(|c| ineq_holds(s, c)),
            AtomForm::Either(a, b) => ineq_holds(s, &a) || ineq_holds(s, &b),
        },
    }
}

fn ineq_holds(s: &CoherentDbm, ineq: &Ineq) -> bool {
    let best = match as_octagonal(ineq) {
        Some(c) => {
            let (r, col, value) = c.cell();
            let entry = s.get(r, col);
            return if ineq.strict {
                *entry < Bound::Finite(value)
            } else {
                *entry <= Bound::Finite(value)
            };
        }
        None => {
            let mut e = Expr::Const(Rational::ZERO);
            for (v, k) in &ineq.lhs.coeffs {
                e = Expr::add(e, Expr::MulConst(k.clone(), Box::new(Expr::Var(*v))));
            }
            eval_closed(&e, s).upper()
        }
    };
    let bound = Bound::Finite(ineq.bound.clone());
    if ineq.strict {
        best < bound
    } else {
        best <= bound
    }
}

/// Strong closure of `m` with every entry involving `v_k` dropped to `+∞`.
fn closed_without(m: &CoherentDbm, k: VarId) -> Option<CoherentDbm> {
    let Octagon::NonBottom(mut s) = strong_closure(m) else {
        return None;
    };
    let d = s.matrix_mut();
    for x in [k.pos(), k.neg()] {
        for y in 0..d.dim() {
            if x != y {
                d.set(x, y, Bound::PlusInfinity);
                d.set(y, x, Bound::PlusInfinity);
            }
        }
    }
    d.set(k.pos(), k.neg(), Bound::PlusInfinity);
    d.set(k.neg(), k.pos(), Bound::PlusInfinity);
    Some(s)
}

/// `v_k := e`.
///
/// Exact for `v_k := ±v_k + c` (a shift of the matrix, after swapping the
/// two forms of `v_k` for `-`) and for `v_k := ±v_l + c`; otherwise `v_k` is
/// bounded by interval evaluation of `e` while every constraint not
/// involving `v_k` survives from the strong closure.
pub fn assign(m: &Octagon, k: VarId, e: &Expr) -> Octagon {
    let Octagon::NonBottom(dbm) = m else {
        return Octagon::Bottom;
    };
    let lin = e.linearize();
    let single = lin.as_ref().and_then(|l| match l.coeffs.iter().next() {
        Some((v, a)) if l.coeffs.len() == 1 && (a.is_integer() && a.abs() == Rational::ONE) => {
            Some((*v, a.is_positive(), &l.constant))
        }
        _ => None,
    });
    match single {
        Some((v, true, c)) if v == k => Octagon::NonBottom(shift(dbm, k, c)),
        Some((v, false, c)) if v == k => Octagon::NonBottom(shift(&negate(dbm, k), k, c)),
        Some((l, positive, c)) => {
            let Some(mut s) = closed_without(dbm, k) else {
                return Octagon::Bottom;
            };
            // v_k - v_l = c, or v_k + v_l = c
            let l_form = if positive { l.pos() } else { l.neg() };
            s.set(l_form, k.pos(), Bound::Finite(c.clone()));
            s.set(k.pos(), l_form, Bound::Finite(-c));
            Octagon::NonBottom(s)
        }
        None => {
            let Octagon::NonBottom(closed) = strong_closure(dbm) else {
                return Octagon::Bottom;
            };
            let range = eval_closed(e, &closed);
            let mut s = closed_without(&closed, k).expect("closed input is not empty");
            s.set(k.neg(), k.pos(), range.upper().double());
            s.set(k.pos(), k.neg(), range.neg_lower().double());
            Octagon::NonBottom(s)
        }
    }
}

/// `v_k := -v_k`: exchanges the rows and columns of `+v_k` and `-v_k`.
fn negate(m: &CoherentDbm, k: VarId) -> CoherentDbm {
    let swap = |i: usize| if i / 2 == k.0 { bar(i) } else { i };
    let mut out = m.clone();
    let d = out.matrix_mut();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            d.set(i, j, m.get(swap(i), swap(j)).clone());
        }
    }
    out
}

fn shift(m: &CoherentDbm, k: VarId, c: &Rational) -> CoherentDbm {
    let weight = |idx: usize| -> i64 {
        if idx == k.pos() {
            1
        } else if idx == k.neg() {
            -1
        } else {
            0
        }
    };
    let mut out = m.clone();
    let dim = m.dim();
    let d = out.matrix_mut();
    for i in 0..dim {
        for j in 0..dim {
            let factor = weight(j) - weight(i);
            if factor != 0 {
                let b = d.get(i, j).add_rational(&(&Rational::integer(factor) * c));
                d.set(i, j, b);
            }
        }
    }
    out
}

/// Drops all knowledge about `v_k`, keeping the implicit constraints among
/// the other variables.
pub fn forget(m: &Octagon, k: VarId) -> Octagon {
    match m {
        Octagon::Bottom => Octagon::Bottom,
        Octagon::NonBottom(dbm) => {
            closed_without(dbm, k).map_or(Octagon::Bottom, Octagon::NonBottom)
        }
    }
}

fn project_closed(s: &CoherentDbm, v: VarId) -> Interval {
    let lo = s.get(v.pos(), v.neg()).finite().map(|b| -b.half());
    let hi = s.get(v.neg(), v.pos()).finite().map(Rational::half);
    Interval::new(lo, hi)
}

fn eval_closed(e: &Expr, s: &CoherentDbm) -> Interval {
    match e {
        Expr::Const(c) => Interval::point(c.clone()),
        Expr::Var(v) => project_closed(s, *v),
        Expr::Neg(a) => eval_closed(a, s).neg(),
        Expr::Add(a, b) => eval_closed(a, s).add(&eval_closed(b, s)),
        Expr::Sub(a, b) => eval_closed(a, s).sub(&eval_closed(b, s)),
        Expr::MulConst(k, a) => eval_closed(a, s).scale(k),
        Expr::Random | Expr::Opaque(..) => Interval::top(),
    }
}

/// Range of `v` over the V+-domain of `m`; both ends are attained when
/// finite.
pub fn project(m: &CoherentDbm, v: VarId) -> Result<Interval, OctError> {
    match strong_closure(m) {
        Octagon::Bottom => Err(OctError::Empty),
        Octagon::NonBottom(s) => Ok(project_closed(&s, v)),
    }
}

/// Interval arithmetic evaluation of `e` over the projections of `m`.
pub fn interval_eval(e: &Expr, m: &CoherentDbm) -> Result<Interval, OctError> {
    match strong_closure(m) {
        Octagon::Bottom => Err(OctError::Empty),
        Octagon::NonBottom(s) => Ok(eval_closed(e, &s)),
    }
}
