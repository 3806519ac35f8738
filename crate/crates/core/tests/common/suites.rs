//! One check per random instance, keyed by seed. The property tests and the
//! acceptance target both drive these.

use std::collections::BTreeSet;

use rand::Rng;

use octolyze_core::analyzer::analyze_traced;
use octolyze_core::lang::{
    parse, pretty, Block, Expr, Guard, Location, Program, Stmt, StmtKind, VarDecl,
};
use octolyze_core::numeric::{Bound, Rational};
use octolyze_core::octagon::{
    assign, equals, guard, guard_with, includes, is_empty, is_strongly_closed, join, meet,
    strong_closure, widen, CoherentDbm, Numerics, Octagon, VarId,
};

use super::fm;
use super::gen::{self, rng};
use super::grid::{concretize, sat, sat_oct, GridBox, Point};
use super::interp::{interpret, States};
use super::naive::{def1_violation, pointwise_le, saturate_naive};

pub type Check = fn(u64) -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn closed(m: &CoherentDbm) -> Option<CoherentDbm> {
    strong_closure(m).dbm().cloned()
}

/// A random matrix with a non-empty domain, per the Fourier-Motzkin oracle.
fn nonempty(r: &mut impl Rng, n_vars: usize) -> CoherentDbm {
    loop {
        let d = r.gen_range(0.15..0.6);
        let m = gen::coherent(r, n_vars, d);
        if !fm::is_empty(&m) {
            return m;
        }
    }
}

fn bounded_nonempty(r: &mut impl Rng, n_vars: usize, b: i64) -> CoherentDbm {
    loop {
        let d = r.gen_range(0.1..0.4);
        let m = gen::bounded(r, n_vars, d, b);
        if !fm::is_empty(&m) {
            return m;
        }
    }
}

fn single(n_vars: usize, integer: bool, kind: StmtKind) -> Program {
    Program {
        vars: (0..n_vars)
            .map(|k| VarDecl {
                name: format!("v{k}"),
                integer,
            })
            .collect(),
        body: Block {
            start: Location(0),
            stmts: vec![Stmt {
                kind,
                after: Some(Location(1)),
            }],
        },
        n_locations: 2,
    }
}

/// Concrete successors of `points` through one statement.
fn run_one(n_vars: usize, integer: bool, kind: StmtKind, points: &BTreeSet<Point>) -> States {
    let p = single(n_vars, integer, kind);
    let rand: Vec<Rational> = (-2..=2).map(Rational::integer).collect();
    let t = interpret(&p, points.clone(), &rand, usize::MAX);
    t.visited.get(&Location(1)).cloned().unwrap_or_default()
}

pub fn closure_matches_naive(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let m = {
        let d = r.gen_range(0.1..0.7);
        gen::coherent(&mut r, n, d)
    };
    let empty = fm::is_empty(&m);
    ensure(is_empty(&m) == empty, || {
        format!("is_empty disagrees (oracle says {empty})\n{m:?}")
    })?;
    match strong_closure(&m) {
        Octagon::Bottom => ensure(empty, || {
            format!("closure is bottom on a non-empty matrix\n{m:?}")
        }),
        Octagon::NonBottom(s) => {
            ensure(!empty, || "closure of an empty matrix is not bottom".into())?;
            let naive = saturate_naive(&m);
            ensure(s == naive, || {
                format!("strong closure\n{s:?}\nnaive\n{naive:?}")
            })
        }
    }
}

pub fn closure_is_normal_form(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let m = nonempty(&mut r, n);
    let s = closed(&m).ok_or("bottom")?;
    if let Some(v) = def1_violation(&s) {
        return Err(format!("{v}\n{s:?}"));
    }
    ensure(is_strongly_closed(&s), || {
        "is_strongly_closed rejects the closure".into()
    })?;
    ensure(closed(&s).as_ref() == Some(&s), || "not idempotent".into())?;
    ensure(pointwise_le(&s, &m), || {
        "closure is not below its argument".into()
    })?;
    // same domain, different matrix: entries between s and m
    let mut alt = s.clone();
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            if r.gen_bool(0.4) {
                alt.set(i, j, m.get(i, j).clone());
            }
        }
    }
    ensure(closed(&alt).as_ref() == Some(&s), || {
        format!("same domain, different closure\n{alt:?}")
    })?;
    let b = GridBox::halves(4);
    ensure(
        concretize(&Octagon::NonBottom(m.clone()), &b)
            == concretize(&Octagon::NonBottom(s.clone()), &b),
        || "closure changed the grid points".into(),
    )
}

/// Every entry of the closure is the supremum over the domain.
pub fn closure_is_saturated(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=2);
    let m = nonempty(&mut r, n);
    let s = closed(&m).ok_or("bottom")?;
    let t = fm::tightest(&m).ok_or("oracle says empty")?;
    for (i, row) in t.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            if s.get(i, j) != b {
                return Err(format!(
                    "entry ({i},{j}) is {} but the supremum is {b}\n{m:?}",
                    s.get(i, j)
                ));
            }
        }
    }
    Ok(())
}

pub fn meet_is_exact(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let a = {
        let d = r.gen_range(0.1..0.4);
        gen::bounded(&mut r, n, d, 4)
    };
    let b = {
        let d = r.gen_range(0.1..0.4);
        gen::bounded(&mut r, n, d, 4)
    };
    let (a, b) = (Octagon::NonBottom(a), Octagon::NonBottom(b));
    let m = meet(&a, &b).map_err(|e| e.to_string())?;
    let g = GridBox::halves(4);
    let expect: BTreeSet<Point> = concretize(&a, &g)
        .intersection(&concretize(&b, &g))
        .cloned()
        .collect();
    ensure(concretize(&m, &g) == expect, || {
        "meet grid differs from the intersection".into()
    })?;
    let both = a
        .dbm()
        .unwrap()
        .matrix()
        .pointwise_min(b.dbm().unwrap().matrix())
        .unwrap();
    let oracle_empty = fm::is_empty(&CoherentDbm::from_dbm(both).unwrap());
    ensure(m.is_bottom() == oracle_empty, || {
        "meet emptiness disagrees with the oracle".into()
    })
}

pub fn join_is_least_cover(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=2);
    let a = nonempty(&mut r, n);
    let b = nonempty(&mut r, n);
    let j = join(
        &Octagon::NonBottom(a.clone()),
        &Octagon::NonBottom(b.clone()),
    )
    .map_err(|e| e.to_string())?;
    let jm = j.dbm().ok_or("join of non-empty octagons is bottom")?;
    // union is covered
    ensure(fm::included(&a, jm) && fm::included(&b, jm), || {
        "join does not cover both arguments".into()
    })?;
    let g = GridBox::halves(4);
    let ga = concretize(&Octagon::NonBottom(a.clone()), &g);
    let gb = concretize(&Octagon::NonBottom(b.clone()), &g);
    let gj = concretize(&j, &g);
    ensure(ga.union(&gb).all(|p| gj.contains(p)), || {
        "a grid point of the union is missing".into()
    })?;
    // least: entrywise max of the two suprema
    let (ta, tb) = (fm::tightest(&a).unwrap(), fm::tightest(&b).unwrap());
    for i in 0..jm.dim() {
        for k in 0..jm.dim() {
            let best = Bound::max(&ta[i][k], &tb[i][k]);
            if jm.get(i, k) != &best {
                return Err(format!(
                    "join entry ({i},{k}) is {}, least cover has {best}",
                    jm.get(i, k)
                ));
            }
        }
    }
    // and below every enumerated cover
    let mut covers = 0;
    for _ in 0..40 {
        let o = if r.gen_bool(0.5) {
            let d = r.gen_range(0.05..0.4);
            gen::coherent(&mut r, n, d)
        } else {
            let mut o = jm.clone();
            for i in 0..o.dim() {
                for k in 0..o.dim() {
                    if i != k && r.gen_bool(0.3) {
                        let b = if r.gen_bool(0.3) {
                            Bound::PlusInfinity
                        } else {
                            o.get(i, k).add(&Bound::int(r.gen_range(0..3)))
                        };
                        o.set(i, k, b);
                    }
                }
            }
            o
        };
        if fm::included(&a, &o) && fm::included(&b, &o) {
            covers += 1;
            ensure(
                includes(&j, &Octagon::NonBottom(o.clone())).unwrap(),
                || format!("join is not below the cover\n{o:?}"),
            )?;
        }
    }
    ensure(covers > 0, || "no cover enumerated".into())
}

pub fn guard_is_sound(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let integer = r.gen_bool(0.5);
    let m = Octagon::NonBottom(bounded_nonempty(&mut r, n, 3));
    let octagonal = r.gen_bool(0.4);
    let g = if octagonal {
        gen::octagonal_atom(&mut r, n)
    } else {
        gen::guard(&mut r, n, 2)
    };
    let ints = vec![integer; n];
    let out = guard_with(&m, &g, Numerics::with_int_vars(&ints));
    let b = if integer {
        GridBox::integers(-3, 3)
    } else {
        GridBox::halves(3)
    };
    let pts = concretize(&m, &b);
    let after = run_one(n, integer, StmtKind::Assume(g.clone()), &pts);
    if let Some(p) = after.iter().find(|p| !sat_oct(&out, p)) {
        return Err(format!("guard {g:?} loses {p:?}\nfrom {m:?}\ngot {out:?}"));
    }
    if octagonal {
        let got = concretize(&out, &b);
        ensure(got == after, || {
            format!("octagonal guard {g:?} is not exact")
        })?;
        ensure(guard(&m, &g) == out || integer, || {
            "rational guard_with differs from guard".into()
        })?;
    }
    Ok(())
}

fn exact_assign(r: &mut impl Rng, n: usize) -> (VarId, Expr) {
    let k = r.gen_range(0..n);
    let l = if r.gen_bool(0.5) {
        k
    } else {
        r.gen_range(0..n)
    };
    let c = Expr::Const(Rational::integer(r.gen_range(-3..=3)));
    let v = gen::var(l);
    let v = if r.gen_bool(0.5) { v } else { Expr::neg(v) };
    (VarId(k), Expr::add(v, c))
}

pub fn assign_is_sound(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let m = Octagon::NonBottom(bounded_nonempty(&mut r, n, 3));
    let exact = r.gen_bool(0.5);
    let (k, e) = match r.gen_range(0..4) {
        _ if exact => exact_assign(&mut r, n),
        0 => (VarId(r.gen_range(0..n)), Expr::Random),
        1 => {
            let (x, y) = (gen::var(r.gen_range(0..n)), gen::var(r.gen_range(0..n)));
            (VarId(r.gen_range(0..n)), Expr::mul(x, y))
        }
        _ => (VarId(r.gen_range(0..n)), gen::linear_expr(&mut r, n)),
    };
    let out = assign(&m, k, &e);
    let b = GridBox::halves(7);
    let src = concretize(&m, &GridBox::halves(3));
    let after = run_one(n, false, StmtKind::Assign(k, e.clone()), &src);
    if let Some(p) = after.iter().find(|p| !sat_oct(&out, p)) {
        return Err(format!(
            "v{} := {e:?} loses {p:?}\nfrom {m:?}\ngot {out:?}",
            k.0
        ));
    }
    if exact {
        ensure(concretize(&out, &b) == after, || {
            format!("v{} := {e:?} is not exact", k.0)
        })?;
    }
    Ok(())
}

pub fn inclusion_matches_oracle(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let a = bounded_nonempty(&mut r, n, 4);
    let mut b = closed(&a).unwrap();
    for _ in 0..r.gen_range(0..4) {
        let (i, j) = (r.gen_range(0..b.dim()), r.gen_range(0..b.dim()));
        if i != j {
            let delta = r.gen_range(-2..=2);
            let v = b.get(i, j).add(&Bound::int(delta));
            b.set(i, j, v);
        }
    }
    let (oa, ob) = (Octagon::NonBottom(a.clone()), Octagon::NonBottom(b.clone()));
    let inc = includes(&oa, &ob).unwrap();
    let oracle = fm::included(&a, &b);
    ensure(inc == oracle, || {
        format!("includes = {inc}, oracle = {oracle}\n{a:?}\n{b:?}")
    })?;
    let back = includes(&ob, &oa).unwrap();
    ensure(back == fm::included(&b, &a), || {
        "reverse inclusion disagrees".into()
    })?;
    ensure(equals(&oa, &ob).unwrap() == (inc && back), || {
        "equals is not mutual inclusion".into()
    })?;
    let g = GridBox::halves(4);
    let (ga, gb) = (concretize(&oa, &g), concretize(&ob, &g));
    ensure(!inc || ga.is_subset(&gb), || {
        "inclusion without grid containment".into()
    })?;
    ensure(!(inc && back) || ga == gb, || {
        "equal octagons with different grids".into()
    })
}

pub fn widen_is_sound(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let a = nonempty(&mut r, n);
    let b = closed(&nonempty(&mut r, n)).unwrap();
    let w = widen(&a, &b).map_err(|e| e.to_string())?;
    ensure(fm::included(&a, &w) && fm::included(&b, &w), || {
        format!("widening drops points\n{a:?}\n{b:?}\n{w:?}")
    })?;
    ensure(w.is_coherent(), || "widening broke coherence".into())
}

/// Iterates `m_i = m_{i-1} ▽ close(n_i)` over an adversarial increasing
/// chain `n_i` and counts the steps that change the iterate. A loop
/// stabilization stopping at the first repeat computes at most that many
/// heads plus the initial and the repeated one.
pub fn widening_chain_moves(seed: u64, horizon: usize) -> (usize, usize) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let mut chain = nonempty(&mut r, n);
    let mut m = closed(&chain).unwrap();
    let mut moves = 0;
    for _ in 0..horizon {
        // grow the chain a little in random directions
        let step = nonempty(&mut r, n);
        let grown = join(
            &Octagon::NonBottom(chain.clone()),
            &Octagon::NonBottom(step),
        )
        .unwrap();
        let mut c = grown.dbm().unwrap().clone();
        for _ in 0..2 {
            let (a, b) = (r.gen_range(0..c.dim()), r.gen_range(0..c.dim()));
            if a != b {
                let v = c.get(a, b).add(&Bound::int(r.gen_range(0..=1)));
                c.set(a, b, v);
            }
        }
        chain = c;
        let next = widen(&m, &closed(&chain).unwrap()).unwrap();
        if next != m {
            moves += 1;
        }
        m = next;
    }
    (moves, n)
}

pub fn widening_terminates(seed: u64) -> Result<(), String> {
    let (moves, n) = widening_chain_moves(seed, 60);
    let len = moves + 2;
    let bound = (2 * n) * (2 * n) + 2;
    ensure(len <= bound, || {
        format!("{len} iterates at N = {n}, bound {bound}")
    })
}

pub fn analyzer_is_sound(seed: u64) -> Result<(), String> {
    let src = gen::program_source(seed);
    let p = parse(&src).map_err(|e| format!("{e}\n{src}"))?;
    let a = analyze_traced(&p);
    let n = p.n_vars();
    let bound = (2 * n) * (2 * n) + 2;
    for l in &a.loops {
        ensure(l.iterations() <= bound, || {
            format!(
                "loop at {} took {} iterations\n{src}",
                l.head,
                l.iterations()
            )
        })?;
    }
    let init: States = [vec![Rational::ZERO; n]].into();
    let rand: Vec<Rational> = (0..3).map(Rational::integer).collect();
    let t = interpret(&p, init, &rand, 20_000);
    for (l, states) in &t.visited {
        let inv = a.invariants.closed(*l);
        if let Some(s) = states.iter().find(|s| !sat_oct(&inv, s)) {
            return Err(format!("{l}: state {s:?} not in {inv:?}\n{src}"));
        }
    }
    Ok(())
}

pub fn pretty_round_trips(seed: u64) -> Result<(), String> {
    let src = gen::program_source(seed);
    let p = parse(&src).map_err(|e| format!("{e}\n{src}"))?;
    let printed = pretty(&p);
    let q = parse(&printed).map_err(|e| format!("{e}\n{printed}"))?;
    ensure(p == q, || {
        format!("round trip changed the program\n{src}\n---\n{printed}")
    })?;
    ensure(pretty(&q) == printed, || "pretty is not stable".into())
}

/// Every grid point of `m` survives the guard `g`'s two branches.
pub fn guard_split_covers(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=2);
    let m = Octagon::NonBottom(bounded_nonempty(&mut r, n, 3));
    let g: Guard = gen::guard(&mut r, n, 2);
    let (t, f) = (guard(&m, &g), guard(&m, &g.negate()));
    for p in concretize(&m, &GridBox::halves(3)) {
        ensure(sat_oct(&t, &p) || sat_oct(&f, &p), || {
            format!("{p:?} lost by both branches of {g:?}")
        })?;
    }
    Ok(())
}

/// `sat` and the library's membership test agree.
pub fn membership_agrees(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let m = gen::coherent(&mut r, n, 0.4);
    for p in GridBox::halves(2).points(n) {
        ensure(sat(&m, &p) == m.contains_point(&p), || {
            format!("membership of {p:?} differs")
        })?;
    }
    Ok(())
}

/// Name, check, and instance count of every oracle suite.
pub const SUITES: &[(&str, Check)] = &[
    (
        "strong closure equals naive saturation",
        closure_matches_naive,
    ),
    (
        "strong closure is an idempotent normal form",
        closure_is_normal_form,
    ),
    ("strong closure is saturated", closure_is_saturated),
    ("meet is exact", meet_is_exact),
    ("join is the least cover", join_is_least_cover),
    ("guard is sound, octagonal guards exact", guard_is_sound),
    (
        "assignment is sound, octagonal forms exact",
        assign_is_sound,
    ),
    (
        "inclusion and equality match the oracle",
        inclusion_matches_oracle,
    ),
    ("widening covers both arguments", widen_is_sound),
    ("analysis contains every concrete state", analyzer_is_sound),
];

/// Runs `check` on seeds `0..cases`, stopping at the first failure.
pub fn run(check: Check, cases: u64) -> Result<(), String> {
    for seed in 0..cases {
        check(seed).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(())
}
