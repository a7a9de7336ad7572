//! Exact ground truth: maximum independent sets, exhaustive checks of the
//! independence bound over every small chain, and clique-pair-free graph
//! families.

use rayon::prelude::*;

use crate::chain::{enumerate_chains_from, shard_first_graphs, write_chain, GraphChain};
use crate::derived::{
    build_difference_graph, find_triangle, verify_lemma_123, verify_lemma_abcd, DifferenceGraph,
    LemmaKind, LemmaViolation,
};
use crate::error::{Error, Result};
use crate::graph::{edge_slots, is_clique, BitIter, EdgeSet, Graph};
use crate::json::ObjectWriter;
use crate::witness::{alon_bound, alon_witness_with_selection, greedy_good_witness};

pub const ORACLE_FORMAT: &str = "chaincliq-oracle-v1";
pub const THEOREM_FORMAT: &str = "chaincliq-theorem-v1";
pub const FAMILY_FORMAT: &str = "chaincliq-family-v1";

/// Default bound on `r` for [`max_independent_set`]; also the hard limit.
pub const MIS_CUTOFF: usize = 64;
/// Bound on `r` for [`naive_max_independent_set`].
pub const NAIVE_CUTOFF: usize = 20;
/// Bound on `n` for [`max_cliquepair_free_family`].
pub const FAMILY_CUTOFF: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub alpha: usize,
    pub optimum: Vec<usize>,
    pub nodes_explored: u64,
}

struct BranchAndBound<'a> {
    adj: &'a [u64],
    best: u64,
    best_size: u32,
    nodes: u64,
}

impl BranchAndBound<'_> {
    /// Number of cliques in a greedy clique cover of `cand`; an independent set
    /// meets each clique at most once.
    fn cover_bound(&self, mut cand: u64) -> u32 {
        let mut cliques = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let mut common = self.adj[v] & cand;
            while common != 0 {
                let u = common.trailing_zeros() as usize;
                cand &= !(1 << u);
                common &= self.adj[u] & !(1 << u);
            }
            cliques += 1;
        }
        cliques
    }

    fn search(&mut self, mut cand: u64, mut current: u64) {
        self.nodes += 1;
        // vertices with no candidate neighbors can always be taken
        let mut pivot = None;
        let mut pivot_degree = 0;
        for v in BitIter(cand) {
            let d = (self.adj[v] & cand).count_ones();
            if d == 0 {
                current |= 1 << v;
                cand &= !(1 << v);
            } else if d > pivot_degree {
                pivot_degree = d;
                pivot = Some(v);
            }
        }
        let size = current.count_ones();
        if size > self.best_size {
            self.best = current;
            self.best_size = size;
        }
        let Some(v) = pivot else { return };
        if size + self.cover_bound(cand) <= self.best_size {
            return;
        }
        self.search(cand & !self.adj[v] & !(1 << v), current | 1 << v);
        self.search(cand & !(1 << v), current);
    }
}

/// Maximum independent set of a graph on at most 64 vertices given as
/// neighbor masks. Returns the optimum as a mask and the node count.
pub(crate) fn solve_mis(adj: &[u64]) -> (u64, u64) {
    debug_assert!(adj.len() <= 64);
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut bb = BranchAndBound {
        adj,
        best: 0,
        best_size: 0,
        nodes: 0,
    };
    bb.search(all, 0);
    (bb.best, bb.nodes)
}

fn mask_to_indices(mask: u64) -> Vec<usize> {
    BitIter(mask).map(|b| b + 1).collect()
}

pub fn max_independent_set(dg: &DifferenceGraph) -> Result<OracleReport> {
    max_independent_set_with_cutoff(dg, MIS_CUTOFF)
}

/// Exact maximum independent set by branch and bound, for `r <= min(cutoff, 64)`.
pub fn max_independent_set_with_cutoff(
    dg: &DifferenceGraph,
    cutoff: usize,
) -> Result<OracleReport> {
    let cutoff = cutoff.min(MIS_CUTOFF);
    if dg.r() > cutoff {
        return Err(Error::CutoffExceeded {
            what: "r",
            value: dg.r(),
            cutoff,
        });
    }
    let adj = dg.adjacency_masks().expect("r <= 64 fits one word");
    let (best, nodes) = solve_mis(&adj);
    Ok(OracleReport {
        alpha: best.count_ones() as usize,
        optimum: mask_to_indices(best),
        nodes_explored: nodes,
    })
}

/// Exact maximum independent set by scanning all `2^r` subsets. Cross-check only.
pub fn naive_max_independent_set(dg: &DifferenceGraph) -> Result<OracleReport> {
    if dg.r() > NAIVE_CUTOFF {
        return Err(Error::CutoffExceeded {
            what: "r",
            value: dg.r(),
            cutoff: NAIVE_CUTOFF,
        });
    }
    let r = dg.r();
    let mut best = 0u64;
    for subset in 0u64..1 << r {
        if subset.count_ones() <= best.count_ones() {
            continue;
        }
        let independent = (1..=r).all(|i| {
            subset >> (i - 1) & 1 == 0 || dg.neighbors(i).all(|j| subset >> (j - 1) & 1 == 0)
        });
        if independent {
            best = subset;
        }
    }
    Ok(OracleReport {
        alpha: best.count_ones() as usize,
        optimum: mask_to_indices(best),
        nodes_explored: 1 << r,
    })
}

/// Outcome of checking one chain against every proven property.
#[derive(Clone, Debug)]
pub struct ChainCheck {
    pub alpha: usize,
    pub greedy_size: usize,
    pub alon_size: usize,
}

/// Runs both lemma verifiers, the triangle check, both witnesses (which certify
/// their own bounds) and the exact oracle on one chain.
pub fn check_chain(c: &GraphChain) -> Result<ChainCheck> {
    let dg = build_difference_graph(c);
    if let Some(v) = verify_lemma_abcd(&dg)? {
        return Err(Error::Lemma(v));
    }
    if let Some(v) = verify_lemma_123(&dg)? {
        return Err(Error::Lemma(v));
    }
    if let Some(t) = find_triangle(&dg) {
        return Err(Error::Lemma(LemmaViolation {
            kind: LemmaKind::Triangle,
            indices: t.to_vec(),
        }));
    }
    let greedy = greedy_good_witness(&dg)?;
    let (alon, selection) = alon_witness_with_selection(&dg)?;
    if !selection.recheck(&dg) {
        return Err(Error::Invariant(
            "triple selection failed its recheck".into(),
        ));
    }
    let alpha = max_independent_set(&dg)?.alpha;
    if alpha < greedy.len() || alpha < alon.len() {
        return Err(Error::Invariant(format!(
            "alpha {alpha} below a witness size ({} / {})",
            greedy.len(),
            alon.len()
        )));
    }
    Ok(ChainCheck {
        alpha,
        greedy_size: greedy.len(),
        alon_size: alon.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub n: usize,
    pub r: usize,
    pub chains_checked: u64,
    pub min_alpha: usize,
    /// First chain in enumeration order attaining `min_alpha`.
    pub argmin_chain: GraphChain,
    pub bound_ok: bool,
}

struct Partial {
    checked: u64,
    min_alpha: usize,
    argmin: GraphChain,
}

fn check_stream(chains: impl Iterator<Item = GraphChain>) -> Result<Option<Partial>> {
    let mut acc: Option<Partial> = None;
    for c in chains {
        let alpha = check_chain(&c)?.alpha;
        match &mut acc {
            None => {
                acc = Some(Partial {
                    checked: 1,
                    min_alpha: alpha,
                    argmin: c,
                })
            }
            Some(p) => {
                p.checked += 1;
                if alpha < p.min_alpha {
                    p.min_alpha = alpha;
                    p.argmin = c;
                }
            }
        }
    }
    Ok(acc)
}

/// Checks every chain of length `r` on `n` vertices.
pub fn verify_theorem_exhaustive(n: usize, r: usize) -> Result<TheoremReport> {
    verify_theorem_exhaustive_sharded(n, r, 1)
}

/// Same as [`verify_theorem_exhaustive`], with the enumeration split by first
/// graph into `shards` streams checked in parallel. The report does not depend
/// on `shards`.
pub fn verify_theorem_exhaustive_sharded(
    n: usize,
    r: usize,
    shards: usize,
) -> Result<TheoremReport> {
    let ranges = shard_first_graphs(n, shards);
    let streams = ranges
        .into_iter()
        .map(|range| enumerate_chains_from(n, r, range))
        .collect::<Result<Vec<_>>>()?;
    let partials = streams
        .into_par_iter()
        .map(check_stream)
        .collect::<Result<Vec<_>>>()?;

    let mut total: Option<Partial> = None;
    for p in partials.into_iter().flatten() {
        total = Some(match total {
            None => p,
            Some(mut t) => {
                t.checked += p.checked;
                if p.min_alpha < t.min_alpha {
                    t.min_alpha = p.min_alpha;
                    t.argmin = p.argmin;
                }
                t
            }
        });
    }
    let total = total.ok_or_else(|| Error::Invariant(format!("no chains for n={n}, r={r}")))?;
    Ok(TheoremReport {
        n,
        r,
        chains_checked: total.checked,
        min_alpha: total.min_alpha,
        argmin_chain: total.argmin,
        bound_ok: total.min_alpha >= alon_bound(r),
    })
}

fn check_family_n(n: usize, family: &[Graph]) -> Result<()> {
    match family.iter().find(|g| g.n() != n) {
        Some(g) => Err(Error::VertexCountMismatch {
            left: n,
            right: g.n(),
        }),
        None => Ok(()),
    }
}

fn is_clique_pair(g: &Graph, h: &Graph) -> bool {
    g != h
        && g.edges().is_subset(h.edges())
        && is_clique(&h.edges().difference(g.edges())).is_some()
}

/// First pair `(G, H)` in bitmask order with `G ⊊ H` and `H \ G` a clique.
pub fn family_has_clique_pair(n: usize, family: &[Graph]) -> Result<Option<(Graph, Graph)>> {
    check_family_n(n, family)?;
    let mut sorted = family.to_vec();
    sorted.sort();
    sorted.dedup();
    for (i, g) in sorted.iter().enumerate() {
        if let Some(h) = sorted[i + 1..].iter().find(|h| is_clique_pair(g, h)) {
            return Ok(Some((g.clone(), h.clone())));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub n: usize,
    pub family: Vec<Graph>,
    pub pair: Option<(Graph, Graph)>,
    pub max_free_size: Option<usize>,
}

/// Largest family of graphs on `n <= 4` vertices containing no clique pair,
/// found as a maximum independent set of the clique-pair conflict graph.
pub fn max_cliquepair_free_family(n: usize) -> Result<FamilyReport> {
    if n > FAMILY_CUTOFF {
        return Err(Error::CutoffExceeded {
            what: "n",
            value: n,
            cutoff: FAMILY_CUTOFF,
        });
    }
    let graphs = all_graphs(n)?;
    let conflicts = clique_pair_conflicts(&graphs);
    let (best, _) = solve_mis(&conflicts);
    let family: Vec<Graph> = BitIter(best).map(|k| graphs[k].clone()).collect();
    let pair = family_has_clique_pair(n, &family)?;
    Ok(FamilyReport {
        n,
        max_free_size: Some(family.len()),
        family,
        pair,
    })
}

/// All `2^C(n,2)` graphs in bitmask order; requires `C(n,2) <= 6`.
pub fn all_graphs(n: usize) -> Result<Vec<Graph>> {
    let slots = edge_slots(n);
    if slots > 6 {
        return Err(Error::CutoffExceeded {
            what: "n",
            value: n,
            cutoff: FAMILY_CUTOFF,
        });
    }
    (0u64..1 << slots)
        .map(|m| EdgeSet::from_mask(n, m).map(Graph::from))
        .collect()
}

/// Symmetric conflict masks over `graphs`: bit `k` of entry `i` is set iff one
/// of the two graphs is a clique pair over the other.
pub fn clique_pair_conflicts(graphs: &[Graph]) -> Vec<u64> {
    assert!(graphs.len() <= 64);
    let mut adj = vec![0u64; graphs.len()];
    for i in 0..graphs.len() {
        for k in 0..graphs.len() {
            if is_clique_pair(&graphs[i], &graphs[k]) {
                adj[i] |= 1 << k;
                adj[k] |= 1 << i;
            }
        }
    }
    adj
}

pub fn write_oracle_report(rep: &OracleReport) -> String {
    ObjectWriter::new(ORACLE_FORMAT)
        .value("alpha", &rep.alpha)
        .value("optimum", &rep.optimum)
        .value("nodes_explored", &rep.nodes_explored)
        .finish()
}

pub fn write_theorem_report(rep: &TheoremReport) -> String {
    ObjectWriter::new(THEOREM_FORMAT)
        .value("n", &rep.n)
        .value("r", &rep.r)
        .value("chains_checked", &rep.chains_checked)
        .value("min_alpha", &rep.min_alpha)
        .raw("argmin_chain", &write_chain(&rep.argmin_chain))
        .value("bound_ok", &rep.bound_ok)
        .finish()
}

fn graph_list(graphs: &[&Graph]) -> String {
    let items: Vec<String> = graphs
        .iter()
        .map(|g| serde_json::to_string(&g.edges().pairs()).expect("pairs serialize"))
        .collect();
    format!("[{}]", items.join(", "))
}

pub fn write_family_report(rep: &FamilyReport) -> String {
    let family: Vec<&Graph> = rep.family.iter().collect();
    let pair = match &rep.pair {
        Some((g, h)) => graph_list(&[g, h]),
        None => "null".into(),
    };
    ObjectWriter::new(FAMILY_FORMAT)
        .value("n", &rep.n)
        .raw("family", &graph_list(&family))
        .raw("pair", &pair)
        .value("max_free_size", &rep.max_free_size)
        .finish()
}
