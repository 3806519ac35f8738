//! Difference-bound matrices and the generic shortest-path machinery.
//!
//! Entry `[i][j]` of a [`Dbm`] carries the potential constraint
//! `v_j - v_i <= entry`. Seen as a weighted digraph (the potential graph),
//! node `i` has an arc to node `j` exactly when the entry is finite.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numeric::Bound;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbmError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix has a strictly negative cycle")]
    NegativeCycle,
    #[error("malformed matrix dump: {0}")]
    Parse(String),
}

/// Dense square matrix of [`Bound`]s, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    entries: Vec<Bound>,
}

impl Dbm {
    /// The all-`+∞` matrix (no constraint at all).
    pub fn top(dim: usize) -> Self {
        Dbm {
            dim,
            entries: vec![Bound::PlusInfinity; dim * dim],
        }
    }

    /// Builds a matrix from rows. Panics if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<Bound>>) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "DBM rows must be square");
            entries.extend(row);
        }
        Dbm { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Bound {
        &self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.entries[i * self.dim + j] = b;
    }

    /// Lowers entry `[i][j]` to `b` if `b` is tighter.
    #[inline]
    pub fn tighten(&mut self, i: usize, j: usize, b: Bound) {
        let slot = &mut self.entries[i * self.dim + j];
        if b < *slot {
            *slot = b;
        }
    }

    pub fn row(&self, i: usize) -> &[Bound] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Bound)> {
        let dim = self.dim;
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, b)| (k / dim, k % dim, b))
    }

    /// Arcs of the potential graph: `(i, j, weight)` for every finite entry.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &Bound)> {
        self.entries().filter(|(_, _, b)| b.is_finite())
    }

    fn check_dim(&self, other: &Dbm) -> Result<(), DbmError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(DbmError::DimensionMismatch(self.dim, other.dim))
        }
    }

    /// The pointwise order `⊴`.
    pub fn leq(&self, other: &Dbm) -> Result<bool, DbmError> {
        self.check_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b))
    }

    fn zip_with(&self, other: &Dbm, f: impl Fn(&Bound, &Bound) -> Bound) -> Result<Dbm, DbmError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Dbm {
            dim: self.dim,
            entries,
        })
    }

    pub fn pointwise_min(&self, other: &Dbm) -> Result<Dbm, DbmError> {
        self.zip_with(other, Bound::min)
    }

    pub fn pointwise_max(&self, other: &Dbm) -> Result<Dbm, DbmError> {
        self.zip_with(other, Bound::max)
    }

    /// Whether the potential graph has a cycle of strictly negative weight.
    ///
    /// Bellman-Ford from a virtual source joined to every node by a 0-weight
    /// arc, so disconnected components are all covered. `O(dim^3)`.
    pub fn has_negative_cycle(&self) -> bool {
        let n = self.dim;
        let arcs: Vec<(usize, usize, &Bound)> = self.arcs().collect();
        // Distances from the virtual source start at 0 for every node.
        let mut dist = vec![Bound::ZERO; n];
        for _ in 0..n {
            let mut changed = false;
            for &(i, j, w) in &arcs {
                let cand = dist[i].add(w);
                if cand < dist[j] {
                    dist[j] = cand;
                    changed = true;
                }
            }
            if !changed {
                return false;
            }
        }
        arcs.iter().any(|&(i, j, w)| dist[i].add(w) < dist[j])
    }

    /// Shortest-path closure (Floyd-Warshall, pivots in increasing order,
    /// diagonal forced to 0 at every step).
    ///
    /// Fails if the matrix has a negative cycle; emptiness has to be decided
    /// first.
    pub fn closure(&self) -> Result<Dbm, DbmError> {
        if self.has_negative_cycle() {
            return Err(DbmError::NegativeCycle);
        }
        let mut m = self.clone();
        m.close_in_place();
        Ok(m)
    }

    /// Floyd-Warshall on `self`. Requires exclusive access and a matrix with
    /// no negative cycle. Row and column `k` are not modified by step `k`
    /// once the diagonal is 0, so updating in place computes the same
    /// sequence as the functional definition.
    pub(crate) fn close_in_place(&mut self) {
        let n = self.dim;
        for i in 0..n {
            self.set(i, i, Bound::ZERO);
        }
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k).clone();
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = ik.add(self.get(k, j));
                    self.tighten(i, j, cand);
                }
            }
            for i in 0..n {
                self.set(i, i, Bound::ZERO);
            }
        }
    }

    /// `m[i][i] = 0` and `m[i][j] <= m[i][k] + m[k][j]` for all `i, j, k`.
    pub fn is_closed(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| *self.get(i, i) == Bound::ZERO)
            && (0..n).all(|k| {
                (0..n)
                    .all(|i| (0..n).all(|j| *self.get(i, j) <= self.get(i, k).add(self.get(k, j))))
            })
    }

    /// Text dump: a `dbm <dim>` header then one line of entries per row.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dbm {}", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dbm {
    type Err = DbmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| DbmError::Parse("empty input".into()))?;
        let dim: usize = header
            .strip_prefix("dbm")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| DbmError::Parse(format!("bad header `{header}`")))?;
        let mut rows = Vec::with_capacity(dim);
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<Bound>()
                        .map_err(|e| DbmError::Parse(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != dim {
                return Err(DbmError::Parse(format!(
                    "row has {} entries, expected {dim}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.len() != dim {
            return Err(DbmError::Parse(format!(
                "{} rows, expected {dim}",
                rows.len()
            )));
        }
        Ok(Dbm::from_rows(rows))
    }
}
