use std::fmt::Write;

use super::ast::{Block, Expr, Guard, Program, StmtKind};

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::MulConst(..) | Expr::Opaque(..) => 2,
        Expr::Const(c) if !c.is_integer() => 2,
        Expr::Neg(_) => 3,
        Expr::Const(c) if c.is_negative() => 3,
        _ => 4,
    }
}

fn expr_at(e: &Expr, min: u8, names: &[&str], out: &mut String) {
    if prec(e) < min {
        out.push('(');
        expr_at(e, 0, names, out);
        out.push(')');
        return;
    }
    match e {
        Expr::Const(c) => write!(out, "{c}").unwrap(),
        Expr::Var(v) => out.push_str(names[v.0]),
        Expr::Random => out.push_str("rand"),
        Expr::Neg(a) => {
            out.push('-');
            expr_at(a, 3, names, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            expr_at(a, 1, names, out);
            out.push_str(if matches!(e, Expr::Add(..)) {
                " + "
            } else {
                " - "
            });
            expr_at(b, 2, names, out);
        }
        Expr::MulConst(k, a) => {
            write!(out, "{k} * ").unwrap();
            expr_at(a, 3, names, out);
        }
        Expr::Opaque(op, a, b) => {
            expr_at(a, 2, names, out);
            out.push_str(match op {
                super::OpaqueOp::Mul => " * ",
                super::OpaqueOp::Div => " / ",
            });
            expr_at(b, 3, names, out);
        }
    }
}

/// Source text of an expression, parenthesized only where needed.
pub fn render_expr(e: &Expr, names: &[&str]) -> String {
    let mut s = String::new();
    expr_at(e, 0, names, &mut s);
    s
}

fn guard_prec(g: &Guard) -> u8 {
    match g {
        Guard::Or(..) => 1,
        Guard::And(..) => 2,
        Guard::Not(_) => 3,
        Guard::Atom(..) | Guard::NonDet => 4,
    }
}

fn guard_at(g: &Guard, min: u8, names: &[&str], out: &mut String) {
    if guard_prec(g) < min {
        out.push('(');
        guard_at(g, 0, names, out);
        out.push(')');
        return;
    }
    match g {
        Guard::NonDet => out.push('?'),
        Guard::Atom(l, op, r) => {
            expr_at(l, 0, names, out);
            write!(out, " {} ", op.symbol()).unwrap();
            expr_at(r, 0, names, out);
        }
        Guard::Not(a) => {
            out.push_str("not ");
            guard_at(a, 3, names, out);
        }
        Guard::And(a, b) | Guard::Or(a, b) => {
            let (p, word) = if matches!(g, Guard::And(..)) {
                (2, " and ")
            } else {
                (1, " or ")
            };
            guard_at(a, p, names, out);
            out.push_str(word);
            guard_at(b, p + 1, names, out);
        }
    }
}

pub fn render_guard(g: &Guard, names: &[&str]) -> String {
    let mut s = String::new();
    guard_at(g, 0, names, &mut s);
    s
}

fn block(b: &Block, depth: usize, names: &[&str], out: &mut String) {
    let pad = "  ".repeat(depth);
    for (k, stmt) in b.stmts.iter().enumerate() {
        out.push_str(&pad);
        match &stmt.kind {
            StmtKind::Assign(v, e) => {
                write!(out, "{} := {}", names[v.0], render_expr(e, names)).unwrap()
            }
            StmtKind::Assert(g) => write!(out, "assert {}", render_guard(g, names)).unwrap(),
            StmtKind::Assume(g) => write!(out, "assume {}", render_guard(g, names)).unwrap(),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                writeln!(
                    out,
                    "if {} then (* {} *)",
                    render_guard(cond, names),
                    then_branch.start
                )
                .unwrap();
                block(then_branch, depth + 1, names, out);
                if else_branch.stmts.is_empty() {
                    out.push_str(&pad);
                } else {
                    writeln!(out, "{pad}else (* {} *)", else_branch.start).unwrap();
                    block(else_branch, depth + 1, names, out);
                    out.push_str(&pad);
                }
                out.push_str("fi");
            }
            StmtKind::While { cond, body } => {
                writeln!(
                    out,
                    "while {} do (* {} *)",
                    render_guard(cond, names),
                    body.start
                )
                .unwrap();
                block(body, depth + 1, names, out);
                out.push_str(&pad);
                out.push_str("done");
            }
        }
        if k + 1 < b.stmts.len() {
            out.push(';');
        }
        if let Some(l) = stmt.after {
            write!(out, " (* {l} *)").unwrap();
        }
        out.push('\n');
    }
}

/// Canonical source text with `(* lk *)` location comments. Parsing the
/// result gives back the same program.
pub fn pretty(p: &Program) -> String {
    let names = p.var_names();
    let mut out = String::new();
    let mut k = 0;
    while k < p.vars.len() {
        let integer = p.vars[k].integer;
        let group: Vec<&str> = p.vars[k..]
            .iter()
            .take_while(|v| v.integer == integer)
            .map(|v| v.name.as_str())
            .collect();
        writeln!(
            out,
            "{} {};",
            if integer { "int" } else { "var" },
            group.join(", ")
        )
        .unwrap();
        k += group.len();
    }
    block(&p.body, 0, &names, &mut out);
    while out.ends_with('\n') {
        out.pop();
    }
    out
}
