use thiserror::Error;

use crate::numeric::Rational;
use crate::octagon::VarId;

use super::ast::{
    assign_locations, Block, CmpOp, Expr, Guard, Location, Program, Stmt, StmtKind, VarDecl,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    Undeclared {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: variable `{name}` declared twice")]
    Redeclared {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: non-integer value assigned to int variable `{name}`")]
    NonIntegral {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: division by zero")]
    DivisionByZero { line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

const KEYWORDS: &[&str] = &[
    "var", "int", "if", "then", "else", "fi", "while", "do", "done", "assert", "assume", "and",
    "or", "not", "rand",
];

// Longest symbols first so that `<=` wins over `<`.
const SYMBOLS: &[&str] = &[
    ":=", "<=", ">=", "!=", "<", ">", "=", ";", ",", "(", ")", "+", "-", "*", "/", "?",
];

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '(' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(ParseError::Syntax {
                        line: l0,
                        col: c0,
                        message: "unterminated comment".into(),
                    });
                }
                if chars[i] == '*' && chars[i + 1] == ')' {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c.is_ascii_digit() {
            let start = i;
            let (l0, c0) = (line, col);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| ParseError::Syntax {
                line: l0,
                col: c0,
                message: format!("number `{text}` is too large"),
            })?;
            out.push(Token {
                tok: Tok::Num(n),
                line: l0,
                col: c0,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            let (l0, c0) = (line, col);
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push(Token {
                tok,
                line: l0,
                col: c0,
            });
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{c}`"),
                });
            };
            out.push(Token {
                tok: Tok::Sym(sym),
                line,
                col,
            });
            advance(&mut i, &mut line, &mut col, sym.len());
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a mut Vec<VarDecl>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let (line, col) = self.here();
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Kw(k) | Tok::Sym(k) => format!("`{k}`"),
        };
        Err(ParseError::Syntax {
            line,
            col,
            message: format!("expected {expected}, found {found}"),
        })
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Tok::Kw(x) if *x == k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, usize, usize)> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok((s, line, col))
            }
            _ => self.error("a variable name"),
        }
    }

    fn resolve(&mut self) -> PResult<VarId> {
        let (name, line, col) = self.ident()?;
        match self.vars.iter().position(|v| v.name == name) {
            Some(i) => Ok(VarId(i)),
            None => Err(ParseError::Undeclared { line, col, name }),
        }
    }

    fn declarations(&mut self) -> PResult<()> {
        loop {
            let integer = if self.eat_kw("var") {
                false
            } else if self.eat_kw("int") {
                true
            } else {
                return Ok(());
            };
            loop {
                let (name, line, col) = self.ident()?;
                if self.vars.iter().any(|v| v.name == name) {
                    return Err(ParseError::Redeclared { line, col, name });
                }
                self.vars.push(VarDecl { name, integer });
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(";")?;
        }
    }

    fn at_block_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof | Tok::Kw("else" | "fi" | "done"))
    }

    fn block(&mut self) -> PResult<Block> {
        let mut stmts = Vec::new();
        while !self.at_block_end() {
            stmts.push(self.stmt()?);
            if !self.eat_sym(";") {
                break;
            }
        }
        Ok(Block {
            start: Location(0),
            stmts,
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let kind = match self.peek() {
            Tok::Kw("if") => {
                self.pos += 1;
                let cond = self.guard()?;
                self.expect_kw("then")?;
                let then_branch = self.block()?;
                let else_branch = if self.eat_kw("else") {
                    self.block()?
                } else {
                    Block {
                        start: Location(0),
                        stmts: vec![],
                    }
                };
                self.expect_kw("fi")?;
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                }
            }
            Tok::Kw("while") => {
                self.pos += 1;
                let cond = self.guard()?;
                self.expect_kw("do")?;
                let body = self.block()?;
                self.expect_kw("done")?;
                StmtKind::While { cond, body }
            }
            Tok::Kw("assert") => {
                self.pos += 1;
                StmtKind::Assert(self.guard()?)
            }
            Tok::Kw("assume") => {
                self.pos += 1;
                StmtKind::Assume(self.guard()?)
            }
            Tok::Ident(_) => {
                let (line, col) = self.here();
                let v = self.resolve()?;
                self.expect_sym(":=")?;
                let e = self.expr()?;
                let int_vars: Vec<bool> = self.vars.iter().map(|d| d.integer).collect();
                if int_vars[v.0] && !e.is_integral(&int_vars) {
                    let name = self.vars[v.0].name.clone();
                    return Err(ParseError::NonIntegral { line, col, name });
                }
                StmtKind::Assign(v, e)
            }
            _ => return self.error("a statement"),
        };
        Ok(Stmt { kind, after: None })
    }

    fn guard(&mut self) -> PResult<Guard> {
        let mut g = self.guard_and()?;
        while self.eat_kw("or") {
            g = Guard::or(g, self.guard_and()?);
        }
        Ok(g)
    }

    fn guard_and(&mut self) -> PResult<Guard> {
        let mut g = self.guard_not()?;
        while self.eat_kw("and") {
            g = Guard::and(g, self.guard_not()?);
        }
        Ok(g)
    }

    fn guard_not(&mut self) -> PResult<Guard> {
        if self.eat_kw("not") {
            return Ok(Guard::Not(Box::new(self.guard_not()?)));
        }
        if self.eat_sym("?") {
            return Ok(Guard::NonDet);
        }
        if matches!(self.peek(), Tok::Sym("(")) {
            // Either a parenthesized guard or an atom starting with a
            // parenthesized expression; try the atom first.
            let save = self.pos;
            if let Ok(atom) = self.atom() {
                return Ok(atom);
            }
            self.pos = save;
            self.expect_sym("(")?;
            let g = self.guard()?;
            self.expect_sym(")")?;
            return Ok(g);
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Guard> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym(">=") => CmpOp::Ge,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym("=") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            _ => return self.error("a comparison"),
        };
        self.pos += 1;
        let rhs = self.expr()?;
        Ok(Guard::atom(lhs, op, rhs))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat_sym("+") {
                e = Expr::add(e, self.term()?);
            } else if self.eat_sym("-") {
                e = Expr::sub(e, self.term()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat_sym("*") {
                e = Expr::mul(e, self.unary()?);
            } else if matches!(self.peek(), Tok::Sym("/")) {
                let (line, col) = self.here();
                self.pos += 1;
                let rhs = self.unary()?;
                e = Expr::div(e, rhs).ok_or(ParseError::DivisionByZero { line, col })?;
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::neg(self.unary()?));
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.pos += 1;
                let n = i64::try_from(n).map_err(|_| {
                    let t = &self.toks[self.pos - 1];
                    ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        message: "number too large".into(),
                    }
                })?;
                Ok(Expr::Const(Rational::integer(n)))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.resolve()?)),
            Tok::Kw("rand") => {
                self.pos += 1;
                // `rand(n)` is accepted; the argument does not restrict the value.
                if self.eat_sym("(") {
                    if !matches!(self.peek(), Tok::Num(_)) {
                        return self.error("a number");
                    }
                    self.pos += 1;
                    self.expect_sym(")")?;
                }
                Ok(Expr::Random)
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => self.error("an expression"),
        }
    }

    fn finish(&self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.error("end of input")
        }
    }
}

/// Parses a program and places its locations.
pub fn parse(src: &str) -> Result<Program, ParseError> {
    let mut vars = Vec::new();
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars: &mut vars,
    };
    p.declarations()?;
    let mut body = p.block()?;
    p.finish()?;
    let n_locations = assign_locations(&mut body);
    Ok(Program {
        vars,
        body,
        n_locations,
    })
}

fn with_names<T>(
    src: &str,
    names: &[&str],
    f: impl FnOnce(&mut Parser) -> PResult<T>,
) -> PResult<T> {
    let mut vars: Vec<VarDecl> = names
        .iter()
        .map(|n| VarDecl {
            name: n.to_string(),
            integer: false,
        })
        .collect();
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars: &mut vars,
    };
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

/// Parses a standalone expression over the given variable names.
pub fn parse_expr(src: &str, names: &[&str]) -> Result<Expr, ParseError> {
    with_names(src, names, |p| p.expr())
}

/// Parses a standalone guard over the given variable names.
pub fn parse_guard(src: &str, names: &[&str]) -> Result<Guard, ParseError> {
    with_names(src, names, |p| p.guard())
}
