//! Complete graphs with self loops, labeled over a finite field.
//!
//! Edges are stored once, as the lower triangle of the adjacency matrix in
//! row-major order: edge `(i, j)` with `i >= j` lives at `i(i+1)/2 + j`.
//! That order is the lexicographic order on normalized pairs, which is the
//! coordinate order used by every code in this crate.

mod io;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldMatrix};

pub const MIN_NODES: usize = 3;
pub const MAX_NODES: usize = 10_000;

/// An undirected edge, normalized so that `i >= j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub i: usize,
    pub j: usize,
}

impl EdgeId {
    pub fn new(a: usize, b: usize) -> Self {
        if a >= b {
            EdgeId { i: a, j: b }
        } else {
            EdgeId { i: b, j: a }
        }
    }

    pub fn is_loop(self) -> bool {
        self.i == self.j
    }

    #[inline]
    pub fn index(self) -> usize {
        self.i * (self.i + 1) / 2 + self.j
    }

    /// Index checked against the node count `n`.
    pub fn index_in(self, n: usize) -> Result<usize> {
        if self.i >= n {
            return Err(Error::NodeOutOfRange { node: self.i, n });
        }
        Ok(self.index())
    }

    pub fn from_index(idx: usize) -> Self {
        // largest i with i(i+1)/2 <= idx
        let mut i = (((8 * idx + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
        while (i + 1) * (i + 2) / 2 <= idx {
            i += 1;
        }
        while i * (i + 1) / 2 > idx {
            i -= 1;
        }
        EdgeId { i, j: idx - i * (i + 1) / 2 }
    }

    /// The endpoint other than `m`, if `m` is an endpoint.
    pub fn other(self, m: usize) -> Option<usize> {
        if self.i == m {
            Some(self.j)
        } else if self.j == m {
            Some(self.i)
        } else {
            None
        }
    }

    pub fn touches(self, m: usize) -> bool {
        self.i == m || self.j == m
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.i, self.j)
    }
}

impl FromStr for EdgeId {
    type Err = Error;

    /// Parses `i:j` in either order.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 0, msg: format!("bad edge {s:?}") };
        let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
        Ok(EdgeId::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
    }
}

/// Number of edges (self loops included) on `n` nodes.
pub const fn edge_count(n: usize) -> usize {
    n * (n + 1) / 2
}

pub const fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A set of edges iterated in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet(BTreeSet<EdgeId>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.0.insert(EdgeId::new(e.i, e.j))
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&EdgeId::new(e.i, e.j))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().map(EdgeId::index).collect()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<T: IntoIterator<Item = EdgeId>>(iter: T) -> Self {
        EdgeSet(iter.into_iter().map(|e| EdgeId::new(e.i, e.j)).collect())
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a EdgeId;
    type IntoIter = std::collections::btree_set::Iter<'a, EdgeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The neighborhood of node `m`: its `n` incident edges. The `l`-th edge in
/// lexicographic order joins `m` and `l`.
pub fn neighborhood(n: usize, m: usize) -> Result<EdgeSet> {
    if m >= n {
        return Err(Error::NodeOutOfRange { node: m, n });
    }
    Ok((0..n).map(|l| EdgeId::new(m, l)).collect())
}

/// Union of the neighborhoods of the failed nodes.
pub fn failure_edges(n: usize, failed: &[usize]) -> Result<EdgeSet> {
    let mut out = EdgeSet::new();
    for &m in failed {
        out = out.union(&neighborhood(n, m)?);
    }
    Ok(out)
}

/// An edge-labeled complete graph with self loops and an erasure mask.
///
/// Erasure is tracked separately from the labels because 0 is a legitimate
/// label. Equality ignores whatever value sits under an erased edge.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    n: usize,
    field: Field,
    labels: Vec<FieldElement>,
    erased: Vec<bool>,
}

impl LabeledGraph {
    pub fn zero(n: usize, field: &Field) -> Result<Self> {
        check_nodes(n)?;
        Ok(Self { n, field: field.clone(), labels: vec![0; edge_count(n)], erased: vec![false; edge_count(n)] })
    }

    /// A graph from labels in lexicographic edge order.
    pub fn from_labels(n: usize, field: &Field, labels: Vec<FieldElement>) -> Result<Self> {
        check_nodes(n)?;
        if labels.len() != edge_count(n) {
            return Err(Error::Shape(format!("{} labels for {} edges", labels.len(), edge_count(n))));
        }
        for &v in &labels {
            field.check(v)?;
        }
        let erased = vec![false; labels.len()];
        Ok(Self { n, field: field.clone(), labels, erased })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Raw labels in lexicographic order. Erased positions hold stale values.
    pub fn labels(&self) -> &[FieldElement] {
        &self.labels
    }

    pub fn label(&self, e: EdgeId) -> Result<FieldElement> {
        let idx = e.index_in(self.n)?;
        if self.erased[idx] {
            return Err(Error::ErasedAccess(e.i, e.j));
        }
        Ok(self.labels[idx])
    }

    pub fn set_label(&mut self, e: EdgeId, v: FieldElement) -> Result<()> {
        let idx = e.index_in(self.n)?;
        self.labels[idx] = self.field.check(v)?;
        self.erased[idx] = false;
        Ok(())
    }

    pub fn is_erased(&self, e: EdgeId) -> bool {
        self.erased[e.index()]
    }

    pub fn erased_mask(&self) -> &[bool] {
        &self.erased
    }

    pub fn has_erasures(&self) -> bool {
        self.erased.iter().any(|&x| x)
    }

    pub fn erased_edges(&self) -> EdgeSet {
        self.erased.iter().enumerate().filter(|(_, &x)| x).map(|(k, _)| EdgeId::from_index(k)).collect()
    }

    pub fn mark_erased(&mut self, e: EdgeId) -> Result<()> {
        let idx = e.index_in(self.n)?;
        self.erased[idx] = true;
        Ok(())
    }

    /// Labels of `edges` in lexicographic order.
    pub fn edge_vector(&self, edges: &EdgeSet) -> Result<Vec<FieldElement>> {
        edges.iter().map(|e| self.label(e)).collect()
    }

    /// Copy of `self` with every edge incident to a failed node erased.
    pub fn apply_erasure(&self, failed: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for e in failure_edges(self.n, failed)?.iter() {
            out.erased[e.index()] = true;
        }
        Ok(out)
    }

    /// Nodes whose whole neighborhood is erased.
    pub fn failed_nodes(&self) -> Vec<usize> {
        (0..self.n).filter(|&m| (0..self.n).all(|l| self.erased[EdgeId::new(m, l).index()])).collect()
    }

    /// The failed nodes, if the erasure mask is exactly a node-failure
    /// pattern.
    pub fn failure_pattern(&self) -> Option<Vec<usize>> {
        let failed = self.failed_nodes();
        let count = self.erased.iter().filter(|&&x| x).count();
        let r = failed.len();
        (count == r * self.n - binom2(r)).then_some(failed)
    }

    pub fn add(&self, other: &LabeledGraph) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        self.field.add_assign_slice(&mut out.labels, &other.labels);
        Ok(out)
    }

    pub fn scale(&self, alpha: FieldElement) -> Result<Self> {
        self.check_unerased()?;
        self.field.check(alpha)?;
        let mut out = self.clone();
        for v in &mut out.labels {
            *v = self.field.mul(alpha, *v);
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &LabeledGraph) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::Shape(format!("graphs on {} and {} nodes", self.n, other.n)));
        }
        self.check_unerased()?;
        other.check_unerased()
    }

    pub(crate) fn check_unerased(&self) -> Result<()> {
        match self.erased.iter().position(|&x| x) {
            Some(k) => {
                let e = EdgeId::from_index(k);
                Err(Error::ErasedAccess(e.i, e.j))
            }
            None => Ok(()),
        }
    }

    /// The symmetric adjacency matrix. Erased entries read as 0.
    pub fn adjacency(&self) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.visible(EdgeId { i, j });
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    /// The adjacency matrix with the strict upper triangle zeroed.
    pub fn lower_triangle(&self) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..=i {
                m.set(i, j, self.visible(EdgeId { i, j }));
            }
        }
        m
    }

    fn visible(&self, e: EdgeId) -> FieldElement {
        let k = e.index();
        if self.erased[k] {
            0
        } else {
            self.labels[k]
        }
    }
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.field == other.field
            && self.erased == other.erased
            && (0..self.labels.len()).all(|k| self.erased[k] || self.labels[k] == other.labels[k])
    }
}

impl Eq for LabeledGraph {}

fn check_nodes(n: usize) -> Result<()> {
    if (MIN_NODES..=MAX_NODES).contains(&n) {
        Ok(())
    } else {
        Err(Error::NodeCount(n))
    }
}
