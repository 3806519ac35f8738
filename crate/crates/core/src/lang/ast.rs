use std::collections::BTreeMap;

use crate::numeric::Rational;
use crate::octagon::VarId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpaqueOp {
    Mul,
    Div,
}

/// Numeric expressions. Variables are resolved to indices at parse time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var(VarId),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    MulConst(Rational, Box<Expr>),
    /// A fresh unknown value on each evaluation.
    Random,
    /// Product or quotient of two non-constant operands; analyzed as unknown.
    Opaque(OpaqueOp, Box<Expr>, Box<Expr>),
}

/// `Σ coeffs[v]·v + constant`, without zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Linear {
    pub coeffs: BTreeMap<VarId, Rational>,
    pub constant: Rational,
}

#[allow(clippy::should_implement_trait)]
impl Linear {
    fn constant(c: Rational) -> Self {
        Linear {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    fn var(v: VarId) -> Self {
        Linear {
            coeffs: BTreeMap::from([(v, Rational::ONE)]),
            constant: Rational::ZERO,
        }
    }

    pub fn scale(mut self, k: &Rational) -> Self {
        if k.is_zero() {
            return Linear::default();
        }
        for c in self.coeffs.values_mut() {
            *c = &*c * k;
        }
        self.constant = &self.constant * k;
        self
    }

    pub fn add(mut self, other: Linear) -> Self {
        for (v, c) in other.coeffs {
            let sum = self.coeffs.get(&v).map_or(c.clone(), |d| d + &c);
            if sum.is_zero() {
                self.coeffs.remove(&v);
            } else {
                self.coeffs.insert(v, sum);
            }
        }
        self.constant = &self.constant + &other.constant;
        self
    }

    pub fn sub(self, other: Linear) -> Self {
        self.add(other.scale(&-Rational::ONE))
    }
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn var(v: usize) -> Expr {
        Expr::Var(VarId(v))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::integer(n))
    }

    /// Negation, folding constants.
    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Neg(Box::new(e)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    /// Product, folded to `MulConst` when either side is a constant.
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(&x * &y),
            (Expr::Const(x), e) | (e, Expr::Const(x)) => Expr::MulConst(x, Box::new(e)),
            (a, b) => Expr::Opaque(OpaqueOp::Mul, Box::new(a), Box::new(b)),
        }
    }

    /// Quotient; `None` on division by the constant zero.
    pub fn div(a: Expr, b: Expr) -> Option<Expr> {
        Some(match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x.checked_div(&y)?),
            (e, Expr::Const(y)) => Expr::MulConst(y.recip()?, Box::new(e)),
            (a, b) => Expr::Opaque(OpaqueOp::Div, Box::new(a), Box::new(b)),
        })
    }

    /// Affine form of the expression, or `None` when it involves `Random`
    /// or an opaque operation.
    pub fn linearize(&self) -> Option<Linear> {
        Some(match self {
            Expr::Const(c) => Linear::constant(c.clone()),
            Expr::Var(v) => Linear::var(*v),
            Expr::Neg(e) => e.linearize()?.scale(&-Rational::ONE),
            Expr::Add(a, b) => a.linearize()?.add(b.linearize()?),
            Expr::Sub(a, b) => a.linearize()?.sub(b.linearize()?),
            Expr::MulConst(k, e) => e.linearize()?.scale(k),
            Expr::Random | Expr::Opaque(..) => return None,
        })
    }

    /// Whether every value of the expression is an integer when the
    /// variables flagged in `int_vars` hold integers.
    pub fn is_integral(&self, int_vars: &[bool]) -> bool {
        match self {
            Expr::Const(c) => c.is_integer(),
            Expr::Var(v) => int_vars[v.0],
            Expr::Neg(e) => e.is_integral(int_vars),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.is_integral(int_vars) && b.is_integral(int_vars),
            Expr::MulConst(k, e) => k.is_integer() && e.is_integral(int_vars),
            Expr::Random => true,
            Expr::Opaque(OpaqueOp::Mul, a, b) => a.is_integral(int_vars) && b.is_integral(int_vars),
            Expr::Opaque(OpaqueOp::Div, ..) => false,
        }
    }

    pub fn has_random(&self) -> bool {
        match self {
            Expr::Random => true,
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Neg(e) | Expr::MulConst(_, e) => e.has_random(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Opaque(_, a, b) => {
                a.has_random() || b.has_random()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl CmpOp {
    /// The comparison holding exactly when `self` fails.
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn eval(self, a: &Rational, b: &Rational) -> bool {
        match self {
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Atom(Expr, CmpOp, Expr),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
    Not(Box<Guard>),
    /// `?`: either branch may be taken.
    NonDet,
}

impl Guard {
    pub fn atom(lhs: Expr, op: CmpOp, rhs: Expr) -> Guard {
        Guard::Atom(lhs, op, rhs)
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        Guard::Or(Box::new(a), Box::new(b))
    }

    /// The negation in negation normal form: `Not` pushed through `and`/`or`
    /// and absorbed into atoms.
    pub fn negate(&self) -> Guard {
        match self {
            Guard::Atom(l, op, r) => Guard::Atom(l.clone(), op.negate(), r.clone()),
            Guard::And(a, b) => Guard::or(a.negate(), b.negate()),
            Guard::Or(a, b) => Guard::and(a.negate(), b.negate()),
            Guard::Not(g) => g.to_nnf(),
            Guard::NonDet => Guard::NonDet,
        }
    }

    /// Equivalent guard without `Not`.
    pub fn to_nnf(&self) -> Guard {
        match self {
            Guard::Atom(..) | Guard::NonDet => self.clone(),
            Guard::And(a, b) => Guard::and(a.to_nnf(), b.to_nnf()),
            Guard::Or(a, b) => Guard::or(a.to_nnf(), b.to_nnf()),
            Guard::Not(g) => g.negate(),
        }
    }
}

/// A program point `l_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location(pub usize);

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "l{}", self.0)
    }
}

impl std::str::FromStr for Location {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('l').unwrap_or(s).parse().map(Location)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Assign(VarId, Expr),
    If {
        cond: Guard,
        then_branch: Block,
        else_branch: Block,
    },
    While {
        cond: Guard,
        body: Block,
    },
    /// Checked by the analyzer, then assumed.
    Assert(Guard),
    Assume(Guard),
}

/// A statement and the location placed right after it, if any. Inside a run
/// of consecutive assignments only the last one carries a location.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub kind: StmtKind,
    pub after: Option<Location>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub start: Location,
    pub stmts: Vec<Stmt>,
}

impl Block {
    /// Location reached at the end of the block.
    pub fn end(&self) -> Location {
        self.stmts
            .iter()
            .rev()
            .find_map(|s| s.after)
            .unwrap_or(self.start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    /// Declared with `int`: only integer values, and strict guards on
    /// integer expressions are tightened by one.
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub vars: Vec<VarDecl>,
    pub body: Block,
    pub n_locations: usize,
}

impl Program {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn int_vars(&self) -> Vec<bool> {
        self.vars.iter().map(|v| v.integer).collect()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> {
        (0..self.n_locations).map(Location)
    }

    pub fn exit(&self) -> Location {
        self.body.end()
    }
}

/// Assigns locations in source order, as described on [`Stmt`]: `l0` at the
/// entry, one at the start of every branch and loop body, and one after
/// every statement except assignments directly followed by an assignment.
/// Returns the number of locations.
pub fn assign_locations(body: &mut Block) -> usize {
    fn fresh(next: &mut usize) -> Location {
        *next += 1;
        Location(*next - 1)
    }
    fn block(b: &mut Block, next: &mut usize) {
        b.start = fresh(next);
        let n = b.stmts.len();
        for k in 0..n {
            match &mut b.stmts[k].kind {
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    block(then_branch, next);
                    block(else_branch, next);
                }
                StmtKind::While { body, .. } => block(body, next),
                _ => {}
            }
            let is_assign = |s: &Stmt| matches!(s.kind, StmtKind::Assign(..));
            let in_run = is_assign(&b.stmts[k]) && b.stmts.get(k + 1).is_some_and(is_assign);
            b.stmts[k].after = if in_run { None } else { Some(fresh(next)) };
        }
    }
    let mut next = 0;
    block(body, &mut next);
    next
}
