//! The octagon abstract domain.
//!
//! An octagon over `N` program variables is stored as a coherent DBM over the
//! `2N` doubled variables: index `2i` stands for `+v_i` and `2i + 1` for
//! `-v_i`, so entry `[r][s]` bounds `v'_s - v'_r` where `v'` is the doubled
//! vector. A constraint such as `v_i + v_j <= c` becomes
//! `v'_{2i} - v'_{2j+1} <= c` and is stored twice, once per coherent twin.

mod closure;
mod constraint;
mod transfer;

use std::fmt;

use thiserror::Error;

use crate::dbm::{Dbm, DbmError};
use crate::numeric::Bound;

pub use closure::{is_empty, is_strongly_closed, strong_closure};
pub use constraint::{
    from_constraints, parse_constraints, render_constraints, to_constraints, OctConstraint,
};
pub use transfer::{assign, entails, forget, guard, guard_with, interval_eval, project, Numerics};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OctError {
    #[error("octagons over {0} and {1} variables")]
    VarCountMismatch(usize, usize),
    #[error("variable v{0} out of range for {1} variables")]
    VarOutOfRange(usize, usize),
    #[error("binary constraint on a single variable v{0}")]
    SameVariable(usize),
    #[error("matrix of dimension {0} is not a doubled-variable matrix")]
    OddDimension(usize),
    #[error("matrix is not coherent at [{0}][{1}]")]
    Incoherent(usize, usize),
    #[error("octagon is empty")]
    Empty,
    #[error("malformed constraint `{0}`")]
    Parse(String),
    #[error(transparent)]
    Dbm(#[from] DbmError),
}

/// A program variable `v_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[allow(clippy::should_implement_trait)]
impl VarId {
    /// Matrix index of `+v_i`.
    pub fn pos(self) -> usize {
        2 * self.0
    }

    /// Matrix index of `-v_i`.
    pub fn neg(self) -> usize {
        2 * self.0 + 1
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Index of the opposite form of the same variable: `i XOR 1`.
#[inline]
pub fn bar(i: usize) -> usize {
    i ^ 1
}

/// A DBM over doubled variables that satisfies `m[i][j] = m[bar j][bar i]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoherentDbm {
    n_vars: usize,
    matrix: Dbm,
}

impl CoherentDbm {
    /// `⊤`: no constraint at all.
    pub fn top(n_vars: usize) -> Self {
        CoherentDbm {
            n_vars,
            matrix: Dbm::top(2 * n_vars),
        }
    }

    /// Wraps a matrix after checking its shape and coherence.
    pub fn from_dbm(matrix: Dbm) -> Result<Self, OctError> {
        let dim = matrix.dim();
        if !dim.is_multiple_of(2) {
            return Err(OctError::OddDimension(dim));
        }
        for (i, j, b) in matrix.entries() {
            if b != matrix.get(bar(j), bar(i)) {
                return Err(OctError::Incoherent(i, j));
            }
        }
        Ok(CoherentDbm {
            n_vars: dim / 2,
            matrix,
        })
    }

    pub(crate) fn from_dbm_unchecked(matrix: Dbm) -> Self {
        debug_assert!(matrix.dim().is_multiple_of(2));
        CoherentDbm {
            n_vars: matrix.dim() / 2,
            matrix,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn dim(&self) -> usize {
        2 * self.n_vars
    }

    pub fn matrix(&self) -> &Dbm {
        &self.matrix
    }

    pub fn into_matrix(self) -> Dbm {
        self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Bound {
        self.matrix.get(i, j)
    }

    /// Sets `[i][j]` and its coherent twin `[bar j][bar i]`.
    pub fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.matrix.set(bar(j), bar(i), b.clone());
        self.matrix.set(i, j, b);
    }

    /// Lowers `[i][j]` and its twin to `b` when `b` is tighter.
    pub fn tighten(&mut self, i: usize, j: usize, b: Bound) {
        self.matrix.tighten(bar(j), bar(i), b.clone());
        self.matrix.tighten(i, j, b);
    }

    pub fn is_coherent(&self) -> bool {
        self.matrix
            .entries()
            .all(|(i, j, b)| b == self.matrix.get(bar(j), bar(i)))
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Dbm {
        &mut self.matrix
    }

    fn check_vars(&self, other: &CoherentDbm) -> Result<(), OctError> {
        if self.n_vars == other.n_vars {
            Ok(())
        } else {
            Err(OctError::VarCountMismatch(self.n_vars, other.n_vars))
        }
    }

    /// Whether the doubled point of `values` satisfies every entry, i.e.
    /// whether `values` lies in the V+-domain.
    pub fn contains_point(&self, values: &[crate::numeric::Rational]) -> bool {
        assert_eq!(values.len(), self.n_vars, "point has wrong arity");
        let doubled = |k: usize| {
            let v = &values[k / 2];
            if k.is_multiple_of(2) {
                v.clone()
            } else {
                -v
            }
        };
        self.matrix
            .arcs()
            .all(|(i, j, b)| Bound::Finite(&doubled(j) - &doubled(i)) <= *b)
    }
}

impl fmt::Debug for CoherentDbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.matrix, f)
    }
}

/// Element of the octagon lattice: `⊥` or a coherent DBM.
///
/// A `NonBottom` value produced by [`strong_closure`], [`meet`] or a guard is
/// known to have a non-empty V+-domain; values produced by assignment,
/// widening or built directly may be empty until closed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Octagon {
    Bottom,
    NonBottom(CoherentDbm),
}

impl Octagon {
    pub fn top(n_vars: usize) -> Self {
        Octagon::NonBottom(CoherentDbm::top(n_vars))
    }

    pub fn dbm(&self) -> Option<&CoherentDbm> {
        match self {
            Octagon::Bottom => None,
            Octagon::NonBottom(m) => Some(m),
        }
    }

    /// Semantic emptiness: `Bottom`, or a matrix with a negative cycle.
    pub fn is_bottom(&self) -> bool {
        match self {
            Octagon::Bottom => true,
            Octagon::NonBottom(m) => is_empty(m),
        }
    }

    /// Strong closure lifted to the lattice.
    pub fn closed(&self) -> Octagon {
        match self {
            Octagon::Bottom => Octagon::Bottom,
            Octagon::NonBottom(m) => strong_closure(m),
        }
    }

    pub fn contains_point(&self, values: &[crate::numeric::Rational]) -> bool {
        match self {
            Octagon::Bottom => false,
            Octagon::NonBottom(m) => m.contains_point(values),
        }
    }
}

impl From<CoherentDbm> for Octagon {
    fn from(m: CoherentDbm) -> Self {
        Octagon::NonBottom(m)
    }
}

impl fmt::Debug for Octagon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Octagon::Bottom => f.write_str("bottom"),
            Octagon::NonBottom(m) => write!(f, "{m:?}"),
        }
    }
}

/// `D+(m) ⊆ D+(n)`: the strong closure of `m` is pointwise below `n`.
pub fn includes(m: &Octagon, n: &Octagon) -> Result<bool, OctError> {
    let m = match m.closed() {
        Octagon::Bottom => return Ok(true),
        Octagon::NonBottom(m) => m,
    };
    match n {
        Octagon::Bottom => Ok(false),
        Octagon::NonBottom(n) => {
            m.check_vars(n)?;
            Ok(m.matrix.leq(&n.matrix)?)
        }
    }
}

/// `D+(m) = D+(n)`: identical strong closures, or both empty.
pub fn equals(m: &Octagon, n: &Octagon) -> Result<bool, OctError> {
    match (m.closed(), n.closed()) {
        (Octagon::Bottom, Octagon::Bottom) => Ok(true),
        (Octagon::NonBottom(a), Octagon::NonBottom(b)) => {
            a.check_vars(&b)?;
            Ok(a == b)
        }
        _ => Ok(false),
    }
}

/// Exact intersection. The result is not closed.
pub fn meet(m: &Octagon, n: &Octagon) -> Result<Octagon, OctError> {
    match (m, n) {
        (Octagon::NonBottom(a), Octagon::NonBottom(b)) => {
            a.check_vars(b)?;
            let min = CoherentDbm::from_dbm_unchecked(a.matrix.pointwise_min(&b.matrix)?);
            if is_empty(&min) {
                Ok(Octagon::Bottom)
            } else {
                Ok(Octagon::NonBottom(min))
            }
        }
        _ => Ok(Octagon::Bottom),
    }
}

/// Best octagonal over-approximation of the union: pointwise max of the two
/// strong closures. Always returns a strongly closed value.
pub fn join(m: &Octagon, n: &Octagon) -> Result<Octagon, OctError> {
    match (m.closed(), n.closed()) {
        (Octagon::Bottom, x) | (x, Octagon::Bottom) => Ok(x),
        (Octagon::NonBottom(a), Octagon::NonBottom(b)) => {
            a.check_vars(&b)?;
            let max = a.matrix.pointwise_max(&b.matrix)?;
            Ok(Octagon::NonBottom(CoherentDbm::from_dbm_unchecked(max)))
        }
    }
}

/// Widening: keeps the entries of `m` that `n` does not exceed and drops the
/// rest to `+∞`.
///
/// `m` must be the previous iterate exactly as returned by `widen`, never a
/// strongly closed copy of it: closing the left argument between steps can
/// produce an infinite strictly increasing chain. `n` should be strongly
/// closed for precision.
pub fn widen(m: &CoherentDbm, n: &CoherentDbm) -> Result<CoherentDbm, OctError> {
    m.check_vars(n)?;
    let mut out = m.clone();
    for k in 0..out.dim() * out.dim() {
        let (i, j) = (k / out.dim(), k % out.dim());
        if n.get(i, j) > m.get(i, j) {
            out.matrix.set(i, j, Bound::PlusInfinity);
        }
    }
    Ok(out)
}

/// [`widen`] lifted to the lattice: `⊥` is the identity on either side.
pub fn widen_octagon(m: &Octagon, n: &Octagon) -> Result<Octagon, OctError> {
    match (m, n) {
        (Octagon::Bottom, x) | (x, Octagon::Bottom) => Ok(x.clone()),
        (Octagon::NonBottom(a), Octagon::NonBottom(b)) => Ok(Octagon::NonBottom(widen(a, b)?)),
    }
}
