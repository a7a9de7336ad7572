//! The derived graph of a chain: indices `1..=r`, with `i < j` adjacent exactly
//! when `G_j \ G_i` is a clique. Also the structural lemma checkers.

use std::fmt;

use serde::Deserialize;

use crate::chain::GraphChain;
use crate::error::{Error, Result};
use crate::graph::{is_clique, BitIter};
use crate::json::{check_format, ObjectWriter};

pub const DGRAPH_FORMAT: &str = "chaincliq-dgraph-v1";

/// Default bound on `r` for the lemma verifiers.
pub const VERIFY_CUTOFF: usize = 200;

#[derive(Clone, PartialEq, Eq)]
pub struct DifferenceGraph {
    r: usize,
    words: usize,
    /// Row-major bit matrix, bit `j-1` of row `i-1` set iff `i ~ j`.
    adj: Vec<u64>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl DifferenceGraph {
    fn edgeless(r: usize) -> Self {
        let words = r.div_ceil(64);
        DifferenceGraph {
            r,
            words,
            adj: vec![0; r * words],
            left: vec![0; r],
            right: vec![0; r],
        }
    }

    fn add_edge(&mut self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        let slot = (a - 1) * self.words + (b - 1) / 64;
        let bit = 1u64 << ((b - 1) % 64);
        if self.adj[slot] & bit != 0 {
            return false;
        }
        self.adj[slot] |= bit;
        self.adj[(b - 1) * self.words + (a - 1) / 64] |= 1 << ((a - 1) % 64);
        self.right[a - 1] += 1;
        self.left[b - 1] += 1;
        true
    }

    /// A graph on `1..=r` from explicit index pairs, for hand-built instances
    /// that need not come from any chain.
    pub fn from_edges(r: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut dg = DifferenceGraph::edgeless(r);
        for &(i, j) in edges {
            for index in [i, j] {
                if index == 0 || index > r {
                    return Err(Error::IndexOutOfRange { index, r });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !dg.add_edge(i, j) {
                return Err(Error::DuplicateEdge {
                    u: i.min(j),
                    v: i.max(j),
                });
            }
        }
        Ok(dg)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Panics if either index is outside `1..=r`.
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        assert!((1..=self.r).contains(&i) && (1..=self.r).contains(&j));
        self.adj[(i - 1) * self.words + (j - 1) / 64] >> ((j - 1) % 64) & 1 == 1
    }

    /// Neighbors of `i` in increasing order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[(i - 1) * self.words..i * self.words];
        row.iter()
            .enumerate()
            .flat_map(|(w, &word)| BitIter(word).map(move |b| w * 64 + b + 1))
    }

    /// First neighbor of `i` strictly greater than `after`.
    pub(crate) fn next_neighbor(&self, i: usize, after: usize) -> Option<usize> {
        self.neighbors(i).find(|&j| j > after)
    }

    pub fn left_count(&self, i: usize) -> usize {
        self.left[i - 1]
    }

    pub fn right_count(&self, i: usize) -> usize {
        self.right[i - 1]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.left[i - 1] + self.right[i - 1]
    }

    pub fn edge_count(&self) -> usize {
        self.right.iter().sum()
    }

    /// All edges `(i,j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.r)
            .flat_map(|i| {
                self.neighbors(i)
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    /// Adjacency as one `u64` per index (bit `j-1` for neighbor `j`), when `r <= 64`.
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        (self.words <= 1).then(|| {
            if self.r == 0 {
                Vec::new()
            } else {
                self.adj.clone()
            }
        })
    }
}

impl fmt::Debug for DifferenceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferenceGraph")
            .field("r", &self.r)
            .field("edges", &self.edges())
            .finish()
    }
}

pub fn build_difference_graph(c: &GraphChain) -> DifferenceGraph {
    let r = c.r();
    let mut dg = DifferenceGraph::edgeless(r);
    for i in 1..=r {
        for j in i + 1..=r {
            let diff = c.graph(j).edges().difference(c.graph(i).edges());
            if is_clique(&diff).is_some() {
                dg.add_edge(i, j);
            }
        }
    }
    dg
}

/// `(left, right)` neighbor tallies of index `i`.
pub fn neighbor_counts(dg: &DifferenceGraph, i: usize) -> Result<(usize, usize)> {
    if i == 0 || i > dg.r {
        return Err(Error::IndexOutOfRange { index: i, r: dg.r });
    }
    Ok((dg.left_count(i), dg.right_count(i)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaKind {
    /// `(a,c)` and `(b,d)` adjacent but `(b,c)` not, for `a<b<c<d`.
    Abcd,
    /// Three consecutive indices each with at least three neighbors on both sides.
    Consecutive123,
    /// `a<b<c` pairwise adjacent.
    Triangle,
}

impl LemmaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaKind::Abcd => "abcd",
            LemmaKind::Consecutive123 => "consecutive-123",
            LemmaKind::Triangle => "triangle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaViolation {
    pub kind: LemmaKind,
    pub indices: Vec<usize>,
}

impl fmt::Display for LemmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.kind.as_str(), self.indices)
    }
}

fn check_cutoff(dg: &DifferenceGraph, cutoff: usize) -> Result<()> {
    if dg.r > cutoff {
        return Err(Error::CutoffExceeded {
            what: "r",
            value: dg.r,
            cutoff,
        });
    }
    Ok(())
}

pub fn verify_lemma_abcd(dg: &DifferenceGraph) -> Result<Option<LemmaViolation>> {
    verify_lemma_abcd_with_cutoff(dg, VERIFY_CUTOFF)
}

/// Lexicographically first `a<b<c<d` with `(a,c)`, `(b,d)` edges and `(b,c)` missing.
pub fn verify_lemma_abcd_with_cutoff(
    dg: &DifferenceGraph,
    cutoff: usize,
) -> Result<Option<LemmaViolation>> {
    check_cutoff(dg, cutoff)?;
    for a in 1..=dg.r {
        for b in a + 1..=dg.r {
            for c in dg.neighbors(a).filter(|&c| c > b) {
                if dg.has_edge(b, c) {
                    continue;
                }
                if let Some(d) = dg.next_neighbor(b, c) {
                    return Ok(Some(LemmaViolation {
                        kind: LemmaKind::Abcd,
                        indices: vec![a, b, c, d],
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn verify_lemma_123(dg: &DifferenceGraph) -> Result<Option<LemmaViolation>> {
    verify_lemma_123_with_cutoff(dg, VERIFY_CUTOFF)
}

/// First `y` such that `y`, `y+1`, `y+2` all have at least three left and three
/// right neighbors.
pub fn verify_lemma_123_with_cutoff(
    dg: &DifferenceGraph,
    cutoff: usize,
) -> Result<Option<LemmaViolation>> {
    check_cutoff(dg, cutoff)?;
    let bad = |i: usize| dg.left_count(i) >= 3 && dg.right_count(i) >= 3;
    Ok((1..=dg.r.saturating_sub(2))
        .find(|&y| bad(y) && bad(y + 1) && bad(y + 2))
        .map(|y| LemmaViolation {
            kind: LemmaKind::Consecutive123,
            indices: vec![y, y + 1, y + 2],
        }))
}

/// Lexicographically first triangle `a<b<c`, if any.
pub fn find_triangle(dg: &DifferenceGraph) -> Option<[usize; 3]> {
    for a in 1..=dg.r {
        for b in dg.neighbors(a).filter(|&b| b > a) {
            let shared = (0..dg.words).find_map(|w| {
                let both = dg.adj[(a - 1) * dg.words + w] & dg.adj[(b - 1) * dg.words + w];
                BitIter(both).map(|bit| w * 64 + bit + 1).find(|&c| c > b)
            });
            if let Some(c) = shared {
                return Some([a, b, c]);
            }
        }
    }
    None
}

pub fn write_dgraph(dg: &DifferenceGraph) -> String {
    let edges: Vec<[usize; 2]> = dg.edges().into_iter().map(|(i, j)| [i, j]).collect();
    ObjectWriter::new(DGRAPH_FORMAT)
        .value("r", &dg.r)
        .value("edges", &edges)
        .finish()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DgraphDoc {
    format: String,
    r: usize,
    edges: Vec<(usize, usize)>,
}

pub fn read_dgraph(text: &str) -> Result<DifferenceGraph> {
    let doc: DgraphDoc = serde_json::from_str(text)?;
    check_format(DGRAPH_FORMAT, &doc.format)?;
    DifferenceGraph::from_edges(doc.r, &doc.edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::validate_chain;
    use crate::graph::make_graph;

    pub(crate) fn path_chain() -> GraphChain {
        validate_chain(
            3,
            vec![
                make_graph(3, &[(1, 2)]).unwrap(),
                make_graph(3, &[(1, 2), (1, 3)]).unwrap(),
                make_graph(3, &[(1, 2), (1, 3), (2, 3)]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn path_example() {
        let dg = build_difference_graph(&path_chain());
        assert_eq!(dg.edges(), vec![(1, 2), (2, 3)]);
        assert_eq!(neighbor_counts(&dg, 2).unwrap(), (1, 1));
        assert_eq!(neighbor_counts(&dg, 1).unwrap(), (0, 1));
        assert!(neighbor_counts(&dg, 4).is_err());
        assert!(neighbor_counts(&dg, 0).is_err());
    }

    #[test]
    fn k2_and_singleton_chains() {
        let c = validate_chain(
            2,
            vec![
                make_graph(2, &[]).unwrap(),
                make_graph(2, &[(1, 2)]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(build_difference_graph(&c).edges(), vec![(1, 2)]);

        let one = validate_chain(4, vec![make_graph(4, &[(1, 4)]).unwrap()]).unwrap();
        let dg = build_difference_graph(&one);
        assert_eq!(dg.r(), 1);
        assert_eq!(dg.edge_count(), 0);
        assert_eq!(neighbor_counts(&dg, 1).unwrap(), (0, 0));
    }

    #[test]
    fn abcd_scan_reports_first_tuple() {
        let dg = DifferenceGraph::from_edges(4, &[(1, 3), (2, 4)]).unwrap();
        let v = verify_lemma_abcd(&dg).unwrap().unwrap();
        assert_eq!(v.kind, LemmaKind::Abcd);
        assert_eq!(v.indices, vec![1, 2, 3, 4]);

        let small = DifferenceGraph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(verify_lemma_abcd(&small).unwrap(), None);
        assert_eq!(
            verify_lemma_abcd(&build_difference_graph(&path_chain())).unwrap(),
            None
        );
    }

    #[test]
    fn abcd_scan_matches_quartic_definition() {
        // dense hand-made graph on 9 indices
        let mut edges = Vec::new();
        for i in 1..=9usize {
            for j in i + 1..=9 {
                if (i * 7 + j * 3) % 5 < 2 {
                    edges.push((i, j));
                }
            }
        }
        let dg = DifferenceGraph::from_edges(9, &edges).unwrap();
        let mut first = None;
        'scan: for a in 1..=9 {
            for b in a + 1..=9 {
                for c in b + 1..=9 {
                    for d in c + 1..=9 {
                        if dg.has_edge(a, c) && dg.has_edge(b, d) && !dg.has_edge(b, c) {
                            first = Some(vec![a, b, c, d]);
                            break 'scan;
                        }
                    }
                }
            }
        }
        assert_eq!(verify_lemma_abcd(&dg).unwrap().map(|v| v.indices), first);
    }

    #[test]
    fn lemma_123_on_handmade_graphs() {
        assert_eq!(
            verify_lemma_123(&DifferenceGraph::from_edges(5, &[]).unwrap()).unwrap(),
            None
        );
        // complete graph on 9 indices: 4, 5, 6 each have >= 3 on both sides
        let mut k9 = Vec::new();
        for i in 1..=9 {
            for j in i + 1..=9 {
                k9.push((i, j));
            }
        }
        let dg = DifferenceGraph::from_edges(9, &k9).unwrap();
        let v = verify_lemma_123(&dg).unwrap().unwrap();
        assert_eq!(v.kind, LemmaKind::Consecutive123);
        assert_eq!(v.indices, vec![4, 5, 6]);
        // K8 has only 4 and 5 qualifying
        k9.retain(|&(_, j)| j <= 8);
        assert_eq!(
            verify_lemma_123(&DifferenceGraph::from_edges(8, &k9).unwrap()).unwrap(),
            None
        );
    }

    #[test]
    fn verifier_cutoff_is_enforced() {
        let dg = DifferenceGraph::from_edges(10, &[]).unwrap();
        assert!(matches!(
            verify_lemma_abcd_with_cutoff(&dg, 9),
            Err(Error::CutoffExceeded { .. })
        ));
        assert!(verify_lemma_123_with_cutoff(&dg, 9).is_err());
    }

    #[test]
    fn triangles() {
        let tri = DifferenceGraph::from_edges(5, &[(2, 4), (4, 5), (2, 5), (1, 2)]).unwrap();
        assert_eq!(find_triangle(&tri), Some([2, 4, 5]));
        assert_eq!(find_triangle(&build_difference_graph(&path_chain())), None);
        // wide graph exercising multiword rows
        let wide = DifferenceGraph::from_edges(130, &[(1, 70), (70, 129), (1, 129)]).unwrap();
        assert_eq!(find_triangle(&wide), Some([1, 70, 129]));
        assert_eq!(wide.adjacency_masks(), None);
    }

    #[test]
    fn from_edges_validation() {
        assert!(matches!(
            DifferenceGraph::from_edges(3, &[(1, 4)]),
            Err(Error::IndexOutOfRange { index: 4, r: 3 })
        ));
        assert!(DifferenceGraph::from_edges(3, &[(2, 2)]).is_err());
        assert!(DifferenceGraph::from_edges(3, &[(1, 2), (2, 1)]).is_err());
    }

    #[test]
    fn dgraph_document() {
        let dg = build_difference_graph(&path_chain());
        let text = write_dgraph(&dg);
        assert_eq!(
            text,
            r#"{"format": "chaincliq-dgraph-v1", "r": 3, "edges": [[1,2],[2,3]]}"#
        );
        assert_eq!(read_dgraph(&text).unwrap(), dg);
        assert!(
            read_dgraph(r#"{"format": "chaincliq-dgraph-v1", "r": 2, "edges": [[1,3]]}"#).is_err()
        );
        assert!(read_dgraph(r#"{"format": "chaincliq-dgraph-v1", "r": 2}"#).is_err());
    }
}
