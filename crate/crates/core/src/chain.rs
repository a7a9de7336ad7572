//! Strictly nested graph chains `G_1 ⊊ G_2 ⊊ ... ⊊ G_r`: validation, seeded
//! generation, exhaustive enumeration and the `chaincliq-chain-v1` format.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Geometric};
use rand_xoshiro::SplitMix64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{edge_slots, make_graph, EdgeSet, Graph};
use crate::json::{check_format, ObjectWriter};

pub const CHAIN_FORMAT: &str = "chaincliq-chain-v1";

/// Largest vertex count the enumerator accepts; every graph must fit in a `u64` mask.
pub const ENUMERATION_MAX_N: usize = 11;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphChain {
    n: usize,
    graphs: Vec<Graph>,
}

impl GraphChain {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Chain length.
    pub fn r(&self) -> usize {
        self.graphs.len()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    /// 1-indexed access, `G_i`.
    pub fn graph(&self, i: usize) -> &Graph {
        &self.graphs[i - 1]
    }

    pub fn first(&self) -> &Graph {
        &self.graphs[0]
    }

    pub fn last(&self) -> &Graph {
        &self.graphs[self.graphs.len() - 1]
    }
}

/// `C(n,2) + 1`, the longest possible chain on `n` vertices.
pub fn max_chain_length(n: usize) -> usize {
    edge_slots(n) + 1
}

fn check_length(n: usize, r: usize) -> Result<()> {
    let max = max_chain_length(n);
    if r == 0 || r > max {
        return Err(Error::LengthOutOfRange { r, max });
    }
    Ok(())
}

pub fn validate_chain(n: usize, graphs: Vec<Graph>) -> Result<GraphChain> {
    if graphs.is_empty() {
        return Err(Error::EmptyChain);
    }
    for g in &graphs {
        if g.n() != n {
            return Err(Error::VertexCountMismatch {
                left: n,
                right: g.n(),
            });
        }
    }
    for (i, pair) in graphs.windows(2).enumerate() {
        if pair[0] == pair[1] {
            return Err(Error::NotDistinct { index: i + 1 });
        }
        if !pair[0].edges().is_subset(pair[1].edges()) {
            return Err(Error::NotNested { index: i + 1 });
        }
    }
    Ok(GraphChain { n, graphs })
}

/// How many fresh edges each random step adds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepDistribution {
    /// One edge per step, starting from the empty graph.
    Single,
    /// `1 + Geometric(p)` edges per step; the first graph gets `Geometric(p)` edges.
    Geometric { p: f64 },
}

impl StepDistribution {
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::StepDistribution(format!(
                "geometric p must lie in (0,1], got {p}"
            )));
        }
        Ok(StepDistribution::Geometric { p })
    }
}

impl FromStr for StepDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "single" => Ok(StepDistribution::Single),
            Some(("geometric", p)) => {
                let p = p
                    .parse::<f64>()
                    .map_err(|e| Error::StepDistribution(format!("{p:?}: {e}")))?;
                StepDistribution::geometric(p)
            }
            _ => Err(Error::StepDistribution(format!(
                "expected `single` or `geometric:P`, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for StepDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepDistribution::Single => f.write_str("single"),
            StepDistribution::Geometric { p } => write!(f, "geometric:{p}"),
        }
    }
}

/// The seeded generator used everywhere randomness is needed (SplitMix64).
pub fn seeded_rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform index in `0..bound`, sampled through `u64` so it is platform independent.
pub(crate) fn below<R: Rng>(rng: &mut R, bound: usize) -> usize {
    rng.random_range(0..bound as u64) as usize
}

pub(crate) fn shuffle<T, R: Rng>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        items.swap(i, below(rng, i + 1));
    }
}

/// Seeded random chain of length `r`. A pure function of its arguments.
pub fn random_chain(n: usize, r: usize, dist: StepDistribution, seed: u64) -> Result<GraphChain> {
    Graph::empty(n)?;
    check_length(n, r)?;
    let mut rng = seeded_rng(seed);
    let mut order: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
        .collect();
    shuffle(&mut rng, &mut order);

    let total = order.len();
    let mut batches = Vec::with_capacity(r);
    match dist {
        StepDistribution::Single => batches.extend(std::iter::once(0).chain((1..r).map(|_| 1))),
        StepDistribution::Geometric { p } => {
            let geo = Geometric::new(p)
                .map_err(|e| Error::StepDistribution(format!("geometric p={p}: {e}")))?;
            let mut used = 0;
            for step in 0..r {
                let sampled = geo.sample(&mut rng).saturating_add(u64::from(step > 0));
                // later steps each still need one fresh edge
                let cap = total - used - (r - 1 - step);
                let batch = usize::try_from(sampled).unwrap_or(usize::MAX).min(cap);
                batches.push(batch);
                used += batch;
            }
        }
    }

    let mut graphs = Vec::with_capacity(r);
    let mut current = EdgeSet::empty(n)?;
    let mut next = order.into_iter();
    for batch in batches {
        let fresh: Vec<_> = next.by_ref().take(batch).collect();
        current = current.union(&EdgeSet::from_pairs(n, fresh)?);
        graphs.push(Graph::from(current.clone()));
    }
    validate_chain(n, graphs)
}

/// Every chain of length `r` on `n` vertices, lexicographic in the sequence of
/// edge-bitmask values.
pub fn enumerate_chains(n: usize, r: usize) -> Result<ChainEnumerator> {
    ChainEnumerator::new(n, r, 0..1u64 << edge_slots(n).min(63))
}

/// The sub-stream of [`enumerate_chains`] whose first graph's mask lies in
/// `first`. Concatenating the streams of consecutive ranges reproduces the full
/// stream.
pub fn enumerate_chains_from(n: usize, r: usize, first: Range<u64>) -> Result<ChainEnumerator> {
    ChainEnumerator::new(n, r, first)
}

/// Splits the first-graph masks into `shards` contiguous ranges, in order.
pub fn shard_first_graphs(n: usize, shards: usize) -> Vec<Range<u64>> {
    let total = 1u64 << edge_slots(n).min(63);
    let shards = (shards.max(1) as u64).min(total);
    let (size, extra) = (total / shards, total % shards);
    let mut start = 0;
    (0..shards)
        .map(|k| {
            let end = start + size + u64::from(k < extra);
            let range = start..end;
            start = end;
            range
        })
        .collect()
}

pub struct ChainEnumerator {
    n: usize,
    r: usize,
    full: u64,
    first: Range<u64>,
    stack: Vec<u64>,
    done: bool,
}

impl ChainEnumerator {
    fn new(n: usize, r: usize, first: Range<u64>) -> Result<Self> {
        Graph::empty(n)?;
        if n > ENUMERATION_MAX_N {
            return Err(Error::CutoffExceeded {
                what: "n",
                value: n,
                cutoff: ENUMERATION_MAX_N,
            });
        }
        check_length(n, r)?;
        let slots = edge_slots(n);
        let full = (1u64 << slots) - 1;
        let first = first.start..first.end.min(full + 1);
        Ok(ChainEnumerator {
            n,
            r,
            full,
            first,
            stack: Vec::with_capacity(r),
            done: false,
        })
    }

    fn feasible(&self, mask: u64, depth: usize) -> bool {
        (self.full & !mask).count_ones() as usize >= self.r - depth
    }

    fn next_sibling(&self, parent: Option<u64>, cur: u64) -> Option<u64> {
        match parent {
            None => (cur + 1 < self.first.end).then_some(cur + 1),
            Some(p) => {
                // next submask of the free bits, in increasing numeric order
                let free = self.full & !p;
                let next = ((cur ^ p) | !free).wrapping_add(1) & free;
                (next != 0).then_some(p | next)
            }
        }
    }

    fn advance(&mut self) -> bool {
        while let Some(cur) = self.stack.pop() {
            if let Some(s) = self.next_sibling(self.stack.last().copied(), cur) {
                self.stack.push(s);
                return true;
            }
        }
        false
    }

    fn emit(&self) -> GraphChain {
        let graphs = self
            .stack
            .iter()
            .map(|&m| Graph::from(EdgeSet::from_mask(self.n, m).expect("n checked")))
            .collect();
        GraphChain { n: self.n, graphs }
    }
}

impl Iterator for ChainEnumerator {
    type Item = GraphChain;

    fn next(&mut self) -> Option<GraphChain> {
        if self.done {
            return None;
        }
        let resumed = if self.stack.is_empty() {
            if self.first.is_empty() {
                false
            } else {
                self.stack.push(self.first.start);
                true
            }
        } else {
            self.advance()
        };
        if !resumed {
            self.done = true;
            return None;
        }
        loop {
            let top = *self.stack.last().expect("stack is nonempty here");
            let depth = self.stack.len();
            let progressed = if !self.feasible(top, depth) {
                self.advance()
            } else if depth == self.r {
                return Some(self.emit());
            } else {
                let free = self.full & !top;
                self.stack.push(top | (free & free.wrapping_neg()));
                true
            };
            if !progressed {
                self.done = true;
                return None;
            }
        }
    }
}

/// The mirrored chain `H_i = G_1 ∪ (G_r \ G_{r+1-i})`.
///
/// For every `i < j`, `H_{r+1-i} \ H_{r+1-j}` equals `G_j \ G_i`, so the derived
/// graph is the index mirror of the original, and reversing twice is the identity.
pub fn reverse_chain(c: &GraphChain) -> GraphChain {
    let base = c.first().edges();
    let top = c.last().edges();
    let graphs = c
        .graphs
        .iter()
        .rev()
        .map(|g| Graph::from(base.union(&top.difference(g.edges()))))
        .collect();
    GraphChain { n: c.n, graphs }
}

/// Applies the vertex relabeling `v -> perm[v-1]` to every graph of the chain.
pub fn relabel_chain(c: &GraphChain, perm: &[usize]) -> Result<GraphChain> {
    let mut seen = vec![false; c.n];
    if perm.len() != c.n {
        return Err(Error::VertexCountMismatch {
            left: c.n,
            right: perm.len(),
        });
    }
    for &p in perm {
        if p == 0 || p > c.n || std::mem::replace(&mut seen[p - 1], true) {
            return Err(Error::Config(format!(
                "{perm:?} is not a permutation of 1..={}",
                c.n
            )));
        }
    }
    let graphs = c
        .graphs
        .iter()
        .map(|g| g.edges().relabel(perm).map(Graph::from))
        .collect::<Result<_>>()?;
    Ok(GraphChain { n: c.n, graphs })
}

pub fn write_chain(c: &GraphChain) -> String {
    let graphs: Vec<String> = c
        .graphs
        .iter()
        .map(|g| serde_json::to_string(&g.edges().pairs()).expect("pairs serialize"))
        .collect();
    ObjectWriter::new(CHAIN_FORMAT)
        .value("n", &c.n)
        .raw("graphs", &format!("[{}]", graphs.join(", ")))
        .finish()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ChainDoc {
    format: String,
    n: usize,
    graphs: Vec<Vec<(usize, usize)>>,
}

impl ChainDoc {
    pub(crate) fn into_chain(self) -> Result<GraphChain> {
        check_format(CHAIN_FORMAT, &self.format)?;
        let graphs = self
            .graphs
            .iter()
            .map(|edges| make_graph(self.n, edges))
            .collect::<Result<Vec<_>>>()?;
        validate_chain(self.n, graphs)
    }
}

pub fn read_chain(text: &str) -> Result<GraphChain> {
    serde_json::from_str::<ChainDoc>(text)?.into_chain()
}
