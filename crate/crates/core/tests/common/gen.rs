//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use octolyze_core::lang::{CmpOp, Expr, Guard};
use octolyze_core::numeric::{Bound, Rational};
use octolyze_core::octagon::{CoherentDbm, VarId};

use super::q;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A coherent matrix whose off-diagonal entries are `+∞` or integers in
/// `[-8, 8]`; each twin pair is finite with probability `density`.
pub fn coherent(r: &mut impl Rng, n_vars: usize, density: f64) -> CoherentDbm {
    let mut m = CoherentDbm::top(n_vars);
    let dim = 2 * n_vars;
    for i in 0..dim {
        for j in 0..dim {
            if i != j && r.gen_bool(density) {
                m.set(i, j, Bound::int(r.gen_range(-8..=8)));
            }
        }
    }
    m
}

/// Like [`coherent`] but with every variable boxed into `[-b, b]` (plus
/// whatever the other entries say), so the domain is bounded.
pub fn bounded(r: &mut impl Rng, n_vars: usize, density: f64, b: i64) -> CoherentDbm {
    let mut m = coherent(r, n_vars, density);
    for v in 0..n_vars {
        let (p, n) = (2 * v, 2 * v + 1);
        m.tighten(n, p, Bound::int(2 * r.gen_range(-b + 1..=b)));
        m.tighten(p, n, Bound::int(2 * r.gen_range(-b + 1..=b)));
    }
    m
}

/// A matrix whose domain contains `point`: each finite entry is the value
/// at the point plus a non-negative slack.
pub fn around(r: &mut impl Rng, point: &[i64], density: f64) -> CoherentDbm {
    let n = point.len();
    let val = |k: usize| {
        if k.is_multiple_of(2) {
            point[k / 2]
        } else {
            -point[k / 2]
        }
    };
    let mut m = CoherentDbm::top(n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            if i != j && r.gen_bool(density) {
                m.set(i, j, Bound::int(val(j) - val(i) + r.gen_range(0..=4)));
            }
        }
    }
    m
}

pub fn var(k: usize) -> Expr {
    Expr::Var(VarId(k))
}

/// A linear expression over at most two variables with coefficients in
/// `[-2, 2]`, mixing the octagonal shapes with general ones.
pub fn linear_expr(r: &mut impl Rng, n_vars: usize) -> Expr {
    let c = Expr::Const(q(r.gen_range(-3..=3)));
    let mut e = c;
    let vars: Vec<usize> = (0..n_vars).collect();
    let k = r.gen_range(0..=2.min(n_vars));
    for &v in vars.choose_multiple(r, k) {
        let coef = *[-2, -1, -1, 1, 1, 2].choose(r).unwrap();
        let term = Expr::mul(Expr::Const(q(coef)), var(v));
        e = Expr::add(term, e);
    }
    e
}

pub fn cmp_op(r: &mut impl Rng) -> CmpOp {
    *[
        CmpOp::Le,
        CmpOp::Lt,
        CmpOp::Ge,
        CmpOp::Gt,
        CmpOp::Eq,
        CmpOp::Ne,
    ]
    .choose(r)
    .unwrap()
}

pub fn atom(r: &mut impl Rng, n_vars: usize) -> Guard {
    Guard::atom(
        linear_expr(r, n_vars),
        cmp_op(r),
        Expr::Const(q(r.gen_range(-3..=3))),
    )
}

/// Atoms of the octagonal shapes `±x ± y <= c`, `±x <= c`.
pub fn octagonal_atom(r: &mut impl Rng, n_vars: usize) -> Guard {
    let x = r.gen_range(0..n_vars);
    let sign = |r: &mut dyn rand::RngCore, e: Expr| if r.gen_bool(0.5) { e } else { Expr::neg(e) };
    let mut lhs = sign(r, var(x));
    if n_vars > 1 && r.gen_bool(0.7) {
        let y = (x + r.gen_range(1..n_vars)) % n_vars;
        lhs = Expr::add(lhs, sign(r, var(y)));
    }
    Guard::atom(lhs, CmpOp::Le, Expr::Const(q(r.gen_range(-4..=4))))
}

pub fn guard(r: &mut impl Rng, n_vars: usize, depth: usize) -> Guard {
    if depth == 0 || r.gen_bool(0.6) {
        return atom(r, n_vars);
    }
    match r.gen_range(0..3) {
        0 => Guard::and(guard(r, n_vars, depth - 1), guard(r, n_vars, depth - 1)),
        1 => Guard::or(guard(r, n_vars, depth - 1), guard(r, n_vars, depth - 1)),
        _ => Guard::Not(Box::new(guard(r, n_vars, depth - 1))),
    }
}

pub fn rational_point(p: &[i64]) -> Vec<Rational> {
    p.iter().map(|&x| q(x)).collect()
}

const NAMES: [&str; 3] = ["x", "y", "z"];

fn src_var(r: &mut impl Rng, n: usize) -> &'static str {
    NAMES[r.gen_range(0..n)]
}

fn src_expr(r: &mut impl Rng, n: usize) -> String {
    let c = r.gen_range(-3..=3);
    let (x, y) = (src_var(r, n), src_var(r, n));
    match r.gen_range(0..9) {
        0 => format!("{c}"),
        1 => format!("{x} + {c}"),
        2 => format!("-{x} + {c}"),
        3 => format!("{x} - {y}"),
        4 => format!("{x} + {y} + {c}"),
        5 => format!("2 * {x} - {y}"),
        6 => "rand(3)".to_string(),
        7 => format!("{x} * {y}"),
        _ => format!("3 * {x} - {c}"),
    }
}

fn src_guard(r: &mut impl Rng, n: usize) -> String {
    let ops = ["<=", "<", ">=", ">", "=", "!="];
    let atom = |r: &mut ChaCha8Rng| {
        let (x, op, c) = (
            src_var(r, n),
            ops[r.gen_range(0..ops.len())],
            r.gen_range(-4..=4),
        );
        match r.gen_range(0..3) {
            0 => format!("{x} {op} {c}"),
            1 => format!("{x} - {} {op} {c}", src_var(r, n)),
            _ => format!("{x} + {} {op} {c}", src_var(r, n)),
        }
    };
    let mut rr = ChaCha8Rng::seed_from_u64(r.gen());
    match r.gen_range(0..6) {
        0 => "?".to_string(),
        1 => format!("{} and {}", atom(&mut rr), atom(&mut rr)),
        2 => format!("{} or not ({})", atom(&mut rr), atom(&mut rr)),
        _ => atom(&mut rr),
    }
}

fn src_block(r: &mut impl Rng, n: usize, depth: usize, indent: usize, out: &mut Vec<String>) {
    let pad = "  ".repeat(indent);
    let len = r.gen_range(1..=3);
    let mut lines = Vec::new();
    for _ in 0..len {
        let kind = if depth == 0 { 0 } else { r.gen_range(0..6) };
        match kind {
            0 | 1 => lines.push(format!("{pad}{} := {}", src_var(r, n), src_expr(r, n))),
            2 => lines.push(format!("{pad}assert {}", src_guard(r, n))),
            3 => {
                let g = src_guard(r, n);
                let mut t = Vec::new();
                src_block(r, n, depth - 1, indent + 1, &mut t);
                let mut e = Vec::new();
                src_block(r, n, depth - 1, indent + 1, &mut e);
                lines.push(format!(
                    "{pad}if {g} then\n{}\n{pad}else\n{}\n{pad}fi",
                    t.join(";\n"),
                    e.join(";\n")
                ));
            }
            _ => {
                // a counter keeps most loops finite for the interpreter
                let x = src_var(r, n);
                let bound = r.gen_range(0..=4);
                let mut b = Vec::new();
                src_block(r, n, depth - 1, indent + 1, &mut b);
                b.push(format!("{pad}  {x} := {x} + 1"));
                lines.push(format!(
                    "{pad}while {x} <= {bound} do\n{}\n{pad}done",
                    b.join(";\n")
                ));
            }
        }
    }
    out.extend(lines);
}

/// Source text of a random structured program over integer variables
/// `x`, `y` (and `z`), all initialized first.
pub fn program_source(seed: u64) -> String {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let mut lines = Vec::new();
    for v in NAMES.iter().take(n) {
        lines.push(format!("{v} := {}", r.gen_range(-2..=2)));
    }
    src_block(&mut r, n, 2, 0, &mut lines);
    format!("int {};\n{}\n", NAMES[..n].join(", "), lines.join(";\n"))
}
