//! Labeled graphs on `{1..n}` stored as bitsets over the `C(n,2)` edge slots.
//!
//! Slot `s` is the rank of the pair `(u,v)`, `u < v`, in lexicographic order, so
//! iterating set bits in slot order yields edges sorted lexicographically and the
//! numeric value of the bitset gives the canonical order on graphs.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 64;

const EDGE_WORDS: usize = (MAX_VERTICES * (MAX_VERTICES - 1) / 2).div_ceil(64);

/// `C(n,2)`, the number of edge slots on `n` vertices.
#[inline]
pub const fn edge_slots(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::VertexCount {
            n,
            max: MAX_VERTICES,
        });
    }
    Ok(())
}

/// An unordered pair `{u,v}` normalized to `u < v`, 1-indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    /// Normalizes the orientation and checks the endpoints against `n`.
    pub fn new(n: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > n || b > n {
            return Err(Error::EndpointOutOfRange { u: a, v: b, n });
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        Ok(Edge {
            u: a.min(b),
            v: a.max(b),
        })
    }

    pub fn u(self) -> usize {
        self.u
    }

    pub fn v(self) -> usize {
        self.v
    }

    pub fn pair(self) -> [usize; 2] {
        [self.u, self.v]
    }

    fn slot(self, n: usize) -> usize {
        // rows 1..u-1 hold (n-1) + (n-2) + ... + (n-u+1) slots
        let before = (self.u - 1) * n - (self.u - 1) * self.u / 2;
        before + (self.v - self.u - 1)
    }

    fn from_slot(n: usize, mut slot: usize) -> Self {
        let mut u = 1;
        while slot >= n - u {
            slot -= n - u;
            u += 1;
        }
        Edge { u, v: u + 1 + slot }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// A set of edges on a fixed vertex count. Not necessarily a chain member:
/// differences `G_j \ G_i` live here too.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    n: usize,
    bits: [u64; EDGE_WORDS],
}

impl EdgeSet {
    pub fn empty(n: usize) -> Result<Self> {
        check_vertex_count(n)?;
        Ok(EdgeSet {
            n,
            bits: [0; EDGE_WORDS],
        })
    }

    /// Builds a set from pairs given in either orientation; duplicates are rejected.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = EdgeSet::empty(n)?;
        for (a, b) in pairs {
            let e = Edge::new(n, a, b)?;
            if !set.insert(e) {
                return Err(Error::DuplicateEdge { u: e.u, v: e.v });
            }
        }
        Ok(set)
    }

    /// The complete graph's edge set on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        let mut set = EdgeSet::empty(n)?;
        for s in 0..edge_slots(n) {
            set.bits[s / 64] |= 1 << (s % 64);
        }
        Ok(set)
    }

    /// Interprets bit `s` of `mask` as edge slot `s`. Only meaningful when
    /// `C(n,2) <= 64`; higher bits are ignored.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let mut set = EdgeSet::empty(n)?;
        let slots = edge_slots(n);
        set.bits[0] = if slots >= 64 {
            mask
        } else {
            mask & ((1u64 << slots) - 1)
        };
        Ok(set)
    }

    /// The bitset as a single integer, if all slots fit in 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        (edge_slots(self.n) <= 64).then_some(self.bits[0])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub(crate) fn insert(&mut self, e: Edge) -> bool {
        let s = e.slot(self.n);
        let (w, b) = (s / 64, 1u64 << (s % 64));
        let fresh = self.bits[w] & b == 0;
        self.bits[w] |= b;
        fresh
    }

    pub fn contains(&self, e: Edge) -> bool {
        let s = e.slot(self.n);
        self.bits[s / 64] >> (s % 64) & 1 == 1
    }

    pub fn contains_pair(&self, a: usize, b: usize) -> bool {
        Edge::new(self.n, a, b).is_ok_and(|e| self.contains(e))
    }

    /// Edges in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.n;
        self.bits
            .iter()
            .enumerate()
            .flat_map(move |(w, &word)| BitIter(word).map(move |b| Edge::from_slot(n, w * 64 + b)))
    }

    pub fn pairs(&self) -> Vec<[usize; 2]> {
        self.iter().map(Edge::pair).collect()
    }

    fn zip_with(&self, other: &EdgeSet, f: impl Fn(u64, u64) -> u64) -> EdgeSet {
        assert_eq!(self.n, other.n, "edge sets over different vertex counts");
        let mut bits = [0; EDGE_WORDS];
        for (i, out) in bits.iter_mut().enumerate() {
            *out = f(self.bits[i], other.bits[i]);
        }
        EdgeSet { n: self.n, bits }
    }

    /// Panics if the vertex counts differ.
    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a & b)
    }

    /// Panics if the vertex counts differ.
    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a | b)
    }

    /// Edges of `self` not in `other`. Panics if the vertex counts differ.
    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    /// Union of the endpoints of all edges.
    pub fn support(&self) -> VertexSet {
        let mut members = 0u64;
        for e in self.iter() {
            members |= 1 << (e.u - 1) | 1 << (e.v - 1);
        }
        VertexSet { members }
    }

    /// Applies a vertex relabeling; `perm[v-1]` is the new label of `v`.
    pub fn relabel(&self, perm: &[usize]) -> Result<EdgeSet> {
        let mut out = EdgeSet::empty(self.n)?;
        for e in self.iter() {
            out.insert(Edge::new(self.n, perm[e.u - 1], perm[e.v - 1])?);
        }
        Ok(out)
    }
}

/// Numeric order on the slot bitset (slot 0 least significant).
impl Ord for EdgeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.bits.iter().rev().cmp(other.bits.iter().rev()))
    }
}

impl PartialOrd for EdgeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeSet(n={}, ", self.n)?;
        f.debug_set()
            .entries(self.iter().map(|e| (e.u, e.v)))
            .finish()?;
        write!(f, ")")
    }
}

/// A chain member: a labeled graph on `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    edges: EdgeSet,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.edges.n
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn empty(n: usize) -> Result<Self> {
        EdgeSet::empty(n).map(Graph::from)
    }
}

impl From<EdgeSet> for Graph {
    fn from(edges: EdgeSet) -> Self {
        Graph { edges }
    }
}

/// Vertex subset of `{1..n}`, `n <= 64`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: u64,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        (1..=MAX_VERTICES).contains(&v) && self.members >> (v - 1) & 1 == 1
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        BitIter(self.members).map(|b| b + 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Iterates the set bit positions of a word, lowest first.
#[derive(Clone, Copy)]
pub(crate) struct BitIter(pub(crate) u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Builds a graph from pairs in either orientation.
pub fn make_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    EdgeSet::from_pairs(n, edges.iter().copied()).map(Graph::from)
}

/// `super \ sub`; requires `sub` to be a subgraph of `super`.
pub fn edge_difference(sup: &Graph, sub: &Graph) -> Result<EdgeSet> {
    if sup.n() != sub.n() {
        return Err(Error::VertexCountMismatch {
            left: sup.n(),
            right: sub.n(),
        });
    }
    if !sub.edges.is_subset(&sup.edges) {
        return Err(Error::NotSubgraph);
    }
    Ok(sup.edges.difference(&sub.edges))
}

/// Returns the vertex support when `s` is exactly the complete graph on its
/// support. The empty set is a clique with empty support.
pub fn is_clique(s: &EdgeSet) -> Option<VertexSet> {
    let support = s.support();
    let k = support.len();
    // s only has pairs inside its support, so matching the count suffices
    (s.len() == k * k.saturating_sub(1) / 2).then_some(support)
}

pub fn is_subgraph(a: &Graph, b: &Graph) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::VertexCountMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(a.edges.is_subset(&b.edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, pairs: &[(usize, usize)]) -> EdgeSet {
        EdgeSet::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn make_graph_normalizes_orientation() {
        let g = make_graph(3, &[(2, 1), (2, 3)]).unwrap();
        assert_eq!(g.edges().pairs(), vec![[1, 2], [2, 3]]);
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn make_graph_rejects_bad_input() {
        assert!(matches!(make_graph(3, &[(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            make_graph(2, &[(1, 3)]),
            Err(Error::EndpointOutOfRange { .. })
        ));
        assert!(matches!(
            make_graph(3, &[(1, 2), (2, 1)]),
            Err(Error::DuplicateEdge { u: 1, v: 2 })
        ));
        assert!(matches!(make_graph(0, &[]), Err(Error::VertexCount { .. })));
        assert!(matches!(
            make_graph(65, &[]),
            Err(Error::VertexCount { .. })
        ));
    }

    #[test]
    fn slots_follow_lexicographic_rank() {
        for n in [2, 3, 5, 11, 64] {
            let mut rank = 0;
            for u in 1..=n {
                for v in u + 1..=n {
                    let e = Edge::new(n, u, v).unwrap();
                    assert_eq!(e.slot(n), rank);
                    assert_eq!(Edge::from_slot(n, rank), e);
                    rank += 1;
                }
            }
            assert_eq!(rank, edge_slots(n));
        }
    }

    #[test]
    fn complete_graph_on_64_vertices_fills_every_slot() {
        let k = EdgeSet::complete(64).unwrap();
        assert_eq!(k.len(), 2016);
        assert!(k.contains_pair(63, 64));
        assert_eq!(is_clique(&k).unwrap().len(), 64);
    }

    #[test]
    fn edge_difference_examples() {
        let sup = make_graph(3, &[(1, 2), (1, 3)]).unwrap();
        let sub = make_graph(3, &[(1, 2)]).unwrap();
        assert_eq!(edge_difference(&sup, &sub).unwrap().pairs(), vec![[1, 3]]);
        assert!(edge_difference(&sup, &sup).unwrap().is_empty());

        let other = make_graph(3, &[(1, 3)]).unwrap();
        assert!(matches!(
            edge_difference(&sub, &other),
            Err(Error::NotSubgraph)
        ));
        let small = Graph::empty(2).unwrap();
        assert!(matches!(
            edge_difference(&sup, &small),
            Err(Error::VertexCountMismatch { .. })
        ));
    }

    #[test]
    fn clique_examples() {
        assert_eq!(
            is_clique(&set(3, &[(1, 2), (1, 3), (2, 3)]))
                .unwrap()
                .to_vec(),
            vec![1, 2, 3]
        );
        assert_eq!(is_clique(&set(3, &[(1, 3), (2, 3)])), None);
        assert_eq!(is_clique(&set(3, &[(1, 2)])).unwrap().to_vec(), vec![1, 2]);
        assert!(is_clique(&EdgeSet::empty(4).unwrap()).unwrap().is_empty());
        // two disjoint edges span 4 vertices but are not K4
        assert_eq!(is_clique(&set(4, &[(1, 2), (3, 4)])), None);
    }

    #[test]
    fn subgraph_examples() {
        let empty = Graph::empty(3).unwrap();
        let a = make_graph(3, &[(1, 2)]).unwrap();
        let b = make_graph(3, &[(1, 3)]).unwrap();
        assert!(is_subgraph(&empty, &b).unwrap());
        assert!(is_subgraph(&a, &a).unwrap());
        assert!(!is_subgraph(&a, &b).unwrap());
        assert!(is_subgraph(&empty, &Graph::empty(4).unwrap()).is_err());
    }

    #[test]
    fn order_is_numeric_on_slot_bits() {
        let a = EdgeSet::from_mask(4, 0b011).unwrap();
        let b = EdgeSet::from_mask(4, 0b100).unwrap();
        assert!(a < b);
        let hi = set(64, &[(63, 64)]);
        let lo = set(64, &[(1, 2), (1, 3), (2, 3)]);
        assert!(lo < hi);
    }

    #[test]
    fn mask_round_trip() {
        let s = set(4, &[(1, 2), (3, 4)]);
        let m = s.to_mask().unwrap();
        assert_eq!(EdgeSet::from_mask(4, m).unwrap(), s);
        assert_eq!(EdgeSet::complete(12).unwrap().to_mask(), None);
    }
}
