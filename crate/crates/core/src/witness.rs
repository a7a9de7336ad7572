//! Constructive independent sets in the derived graph, each certified on
//! construction.
//!
//! Two extraction procedures are provided:
//!
//! * [`greedy_good_witness`]: an index is *good* when it has at most two right
//!   neighbors or at most two left neighbors. No three consecutive indices are
//!   all bad, so one side holds at least `(r-2)/6` good indices, and a greedy
//!   scan over that side keeps at least a third of them, giving size
//!   `>= (r-2)/18`.
//! * [`alon_witness`]: one index is picked from each complete triple
//!   `(3i-2, 3i-1, 3i)` according to which of three neighbor conditions fails.
//!   With edges oriented from lower to higher index, every picked index is a
//!   sink or a source among the picks, so the larger of the two classes is
//!   independent with size `>= ceil(floor(r/3)/2)`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Deserialize;

use crate::derived::DifferenceGraph;
use crate::error::{Error, Result};
use crate::json::{check_format, ObjectWriter};

pub const WITNESS_FORMAT: &str = "chaincliq-witness-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    GreedyGood,
    AlonTriples,
    SingletonFallback,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::GreedyGood => "greedy-good",
            Method::AlonTriples => "alon-triples",
            Method::SingletonFallback => "singleton-fallback",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy-good" => Ok(Method::GreedyGood),
            "alon-triples" => Ok(Method::AlonTriples),
            "singleton-fallback" => Ok(Method::SingletonFallback),
            other => Err(Error::Config(format!("unknown witness method {other:?}"))),
        }
    }
}

/// Proven size of the greedy witness: `max(1, ceil((r-2)/18))`.
pub fn greedy_bound(r: usize) -> usize {
    r.saturating_sub(2).div_ceil(18).max(1)
}

/// Proven size of the triple-selection witness: `max(1, ceil(floor(r/3)/2))`.
pub fn alon_bound(r: usize) -> usize {
    (r / 3).div_ceil(2).max(1)
}

/// An independent index set together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSet {
    indices: Vec<usize>,
    method: Method,
    guarantee: Ratio<u64>,
}

impl WitnessSet {
    /// Checks range, nonemptiness, independence and the size guarantee.
    pub fn certify(
        dg: &DifferenceGraph,
        mut indices: Vec<usize>,
        method: Method,
        guarantee: Ratio<u64>,
    ) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if dg.r() > 0 && indices.is_empty() {
            return Err(Error::Invariant(format!(
                "{method} produced an empty witness"
            )));
        }
        if !check_independent(dg, &indices)? {
            return Err(Error::Invariant(format!(
                "{method} witness {indices:?} is not independent"
            )));
        }
        if Ratio::from_integer(indices.len() as u64) < guarantee {
            return Err(Error::Invariant(format!(
                "{method} witness has size {} below its guarantee {guarantee}",
                indices.len()
            )));
        }
        Ok(WitnessSet {
            indices,
            method,
            guarantee,
        })
    }

    /// Sorted indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn guarantee(&self) -> Ratio<u64> {
        self.guarantee
    }
}

/// True iff no two members of `s` are adjacent.
pub fn check_independent(dg: &DifferenceGraph, s: &[usize]) -> Result<bool> {
    if let Some(&index) = s.iter().find(|&&i| i == 0 || i > dg.r()) {
        return Err(Error::IndexOutOfRange { index, r: dg.r() });
    }
    Ok(s.iter()
        .enumerate()
        .all(|(k, &i)| s[k + 1..].iter().all(|&j| i == j || !dg.has_edge(i, j))))
}

fn singleton(dg: &DifferenceGraph, guarantee: usize) -> Result<WitnessSet> {
    WitnessSet::certify(
        dg,
        vec![1],
        Method::SingletonFallback,
        Ratio::from_integer(guarantee as u64),
    )
}

pub fn greedy_good_witness(dg: &DifferenceGraph) -> Result<WitnessSet> {
    let r = dg.r();
    let bound = greedy_bound(r);
    let right_good: Vec<usize> = (1..=r).filter(|&i| dg.right_count(i) <= 2).collect();
    let left_good: Vec<usize> = (1..=r).filter(|&i| dg.left_count(i) <= 2).collect();

    // few right neighbors: scan left to right, so each pick blocks at most two
    // later candidates; mirrored for the left side
    let candidates: Box<dyn Iterator<Item = usize>> = if right_good.len() >= left_good.len() {
        Box::new(right_good.into_iter())
    } else {
        Box::new(left_good.into_iter().rev())
    };
    let mut blocked = vec![false; r + 1];
    let mut picked = Vec::new();
    for i in candidates {
        if blocked[i] {
            continue;
        }
        picked.push(i);
        for j in dg.neighbors(i) {
            blocked[j] = true;
        }
    }
    if picked.is_empty() {
        return singleton(dg, bound);
    }
    WitnessSet::certify(
        dg,
        picked,
        Method::GreedyGood,
        Ratio::from_integer(bound as u64),
    )
}

/// Which neighbor condition fails for the index picked from a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bullet {
    /// `3i-2` has no neighbor beyond `3i-1`; a sink among the picks.
    FirstNoLaterNeighbor,
    /// `3i-1` has no right neighbor; a sink.
    MiddleNoRight,
    /// `3i-1` has no left neighbor; a source.
    MiddleNoLeft,
    /// `3i` has no neighbor before `3i-1`; a source.
    LastNoEarlierNeighbor,
}

impl Bullet {
    /// 1, 2 or 3, the position of the violated condition.
    pub fn number(self) -> u8 {
        match self {
            Bullet::FirstNoLaterNeighbor => 1,
            Bullet::MiddleNoRight | Bullet::MiddleNoLeft => 2,
            Bullet::LastNoEarlierNeighbor => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleChoice {
    /// The triple number `i`, covering indices `3i-2..=3i`.
    pub triple: usize,
    pub chosen: usize,
    pub bullet: Bullet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleSelection {
    choices: Vec<TripleChoice>,
}

impl TripleSelection {
    pub fn choices(&self) -> &[TripleChoice] {
        &self.choices
    }

    pub fn chosen(&self) -> Vec<usize> {
        self.choices.iter().map(|c| c.chosen).collect()
    }

    /// Re-evaluates every recorded condition on `dg`; true iff all are violated
    /// and each pick belongs to its triple.
    pub fn recheck(&self, dg: &DifferenceGraph) -> bool {
        self.choices.iter().enumerate().all(|(k, c)| {
            let first = 3 * c.triple - 2;
            let expected = match c.bullet {
                Bullet::FirstNoLaterNeighbor => first,
                Bullet::MiddleNoRight | Bullet::MiddleNoLeft => first + 1,
                Bullet::LastNoEarlierNeighbor => first + 2,
            };
            c.triple == k + 1 && c.chosen == expected && bullet_violated(dg, c.triple, c.bullet)
        })
    }
}

fn bullet_violated(dg: &DifferenceGraph, triple: usize, bullet: Bullet) -> bool {
    let middle = 3 * triple - 1;
    match bullet {
        Bullet::FirstNoLaterNeighbor => dg.next_neighbor(middle - 1, middle).is_none(),
        Bullet::MiddleNoRight => dg.right_count(middle) == 0,
        Bullet::MiddleNoLeft => dg.left_count(middle) == 0,
        Bullet::LastNoEarlierNeighbor => {
            dg.neighbors(middle + 1).next().is_none_or(|m| m >= middle)
        }
    }
}

/// Picks one index per complete triple, preferring the lowest index whose
/// condition fails.
pub fn select_triples(dg: &DifferenceGraph) -> Result<TripleSelection> {
    let mut choices = Vec::with_capacity(dg.r() / 3);
    for triple in 1..=dg.r() / 3 {
        let first = 3 * triple - 2;
        let (chosen, bullet) = [
            (first, Bullet::FirstNoLaterNeighbor),
            (first + 1, Bullet::MiddleNoRight),
            (first + 1, Bullet::MiddleNoLeft),
            (first + 2, Bullet::LastNoEarlierNeighbor),
        ]
        .into_iter()
        .find(|&(_, b)| bullet_violated(dg, triple, b))
        .ok_or_else(|| {
            Error::Invariant(format!(
                "triple ({first},{},{}) satisfies all three neighbor conditions",
                first + 1,
                first + 2
            ))
        })?;
        choices.push(TripleChoice {
            triple,
            chosen,
            bullet,
        });
    }
    Ok(TripleSelection { choices })
}

/// Restricted `(indegree, outdegree)` of each member of `selected` within the
/// induced subgraph, with edges oriented from lower to higher index.
pub fn oriented_degrees(dg: &DifferenceGraph, selected: &[usize]) -> Vec<(usize, usize)> {
    selected
        .iter()
        .map(|&s| {
            let indeg = selected
                .iter()
                .filter(|&&t| t < s && dg.has_edge(t, s))
                .count();
            let outdeg = selected
                .iter()
                .filter(|&&t| t > s && dg.has_edge(s, t))
                .count();
            (indeg, outdeg)
        })
        .collect()
}

pub fn alon_witness(dg: &DifferenceGraph) -> Result<WitnessSet> {
    alon_witness_with_selection(dg).map(|(w, _)| w)
}

/// The triple-selection witness together with the per-triple choices behind it.
pub fn alon_witness_with_selection(dg: &DifferenceGraph) -> Result<(WitnessSet, TripleSelection)> {
    let bound = Ratio::from_integer(alon_bound(dg.r()) as u64);
    if dg.r() < 3 {
        return Ok((singleton(dg, 1)?, TripleSelection::default()));
    }
    let selection = select_triples(dg)?;
    let picked = selection.chosen();
    let degrees = oriented_degrees(dg, &picked);

    let mut sinks = Vec::new();
    let mut sources = Vec::new();
    for (&s, &(indeg, outdeg)) in picked.iter().zip(&degrees) {
        if indeg > 0 && outdeg > 0 {
            return Err(Error::Invariant(format!(
                "picked index {s} has indegree {indeg} and outdegree {outdeg}"
            )));
        }
        if outdeg == 0 {
            sinks.push(s);
        }
        if indeg == 0 {
            sources.push(s);
        }
    }
    let larger = if sinks.len() >= sources.len() {
        sinks
    } else {
        sources
    };
    let witness = WitnessSet::certify(dg, larger, Method::AlonTriples, bound)?;
    Ok((witness, selection))
}

/// The larger of the two witnesses; ties go to the triple selection.
pub fn best_witness(dg: &DifferenceGraph) -> Result<WitnessSet> {
    let greedy = greedy_good_witness(dg)?;
    let alon = alon_witness(dg)?;
    Ok(if greedy.len() > alon.len() {
        greedy
    } else {
        alon
    })
}

pub fn write_witness(w: &WitnessSet) -> String {
    ObjectWriter::new(WITNESS_FORMAT)
        .value("method", w.method.as_str())
        .value("indices", &w.indices)
        .value("guarantee", &w.guarantee.to_string())
        .finish()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessDoc {
    format: String,
    method: String,
    indices: Vec<usize>,
    guarantee: String,
}

/// Parses a witness document and re-certifies it against `dg`.
pub fn read_witness(text: &str, dg: &DifferenceGraph) -> Result<WitnessSet> {
    let doc: WitnessDoc = serde_json::from_str(text)?;
    check_format(WITNESS_FORMAT, &doc.format)?;
    let method = doc.method.parse()?;
    let guarantee = doc
        .guarantee
        .parse::<Ratio<u64>>()
        .map_err(|e| Error::Config(format!("guarantee {:?}: {e}", doc.guarantee)))?;
    WitnessSet::certify(dg, doc.indices, method, guarantee)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> DifferenceGraph {
        DifferenceGraph::from_edges(3, &[(1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn bounds() {
        assert_eq!(greedy_bound(1), 1);
        assert_eq!(greedy_bound(20), 1);
        assert_eq!(greedy_bound(21), 2);
        assert_eq!(greedy_bound(38), 2);
        assert_eq!(greedy_bound(39), 3);
        assert_eq!(alon_bound(1), 1);
        assert_eq!(alon_bound(3), 1);
        assert_eq!(alon_bound(12), 2);
        assert_eq!(alon_bound(18), 3);
        assert_eq!(alon_bound(20), 3);
    }

    #[test]
    fn independence_examples() {
        let dg = path();
        assert!(check_independent(&dg, &[1, 3]).unwrap());
        assert!(!check_independent(&dg, &[1, 2]).unwrap());
        assert!(check_independent(&dg, &[2]).unwrap());
        assert!(check_independent(&dg, &[]).unwrap());
        assert!(matches!(
            check_independent(&dg, &[4]),
            Err(Error::IndexOutOfRange { index: 4, r: 3 })
        ));
    }

    #[test]
    fn greedy_on_path() {
        let w = greedy_good_witness(&path()).unwrap();
        assert_eq!(w.indices(), &[1, 3]);
        assert_eq!(w.method(), Method::GreedyGood);
        assert_eq!(w.guarantee(), Ratio::from_integer(1));
    }

    #[test]
    fn greedy_scans_left_side_right_to_left() {
        // index 5 has four left neighbors and 1..4 have one right neighbor each:
        // right-good = all 5, left-good = 1..4, so the right side wins here
        let star = DifferenceGraph::from_edges(5, &[(1, 5), (2, 5), (3, 5), (4, 5)]).unwrap();
        assert_eq!(greedy_good_witness(&star).unwrap().indices(), &[1, 2, 3, 4]);
        // mirrored star: index 1 has four right neighbors; left side is larger
        let mirror = DifferenceGraph::from_edges(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        assert_eq!(
            greedy_good_witness(&mirror).unwrap().indices(),
            &[2, 3, 4, 5]
        );
    }

    #[test]
    fn singletons_for_r1() {
        let dg = DifferenceGraph::from_edges(1, &[]).unwrap();
        let g = greedy_good_witness(&dg).unwrap();
        assert_eq!(g.indices(), &[1]);
        let a = alon_witness(&dg).unwrap();
        assert_eq!(a.indices(), &[1]);
        assert_eq!(a.method(), Method::SingletonFallback);
        assert_eq!(best_witness(&dg).unwrap().indices(), &[1]);
    }

    #[test]
    fn alon_on_path() {
        let (w, sel) = alon_witness_with_selection(&path()).unwrap();
        assert_eq!(w.indices(), &[1]);
        assert_eq!(w.method(), Method::AlonTriples);
        assert_eq!(
            sel.choices(),
            &[TripleChoice {
                triple: 1,
                chosen: 1,
                bullet: Bullet::FirstNoLaterNeighbor
            }]
        );
        assert!(sel.recheck(&path()));
    }

    #[test]
    fn alon_tie_breaks_toward_lowest_index() {
        // (1,3) present: bullet 1 holds for index 1; index 2 is isolated, so it
        // fails bullet 2 with no right neighbor
        let dg = DifferenceGraph::from_edges(3, &[(1, 3)]).unwrap();
        let sel = select_triples(&dg).unwrap();
        assert_eq!(sel.choices()[0].chosen, 2);
        assert_eq!(sel.choices()[0].bullet, Bullet::MiddleNoRight);
        // 2 has a right neighbor but no left one
        let dg = DifferenceGraph::from_edges(4, &[(1, 3), (2, 4)]).unwrap();
        assert_eq!(
            select_triples(&dg).unwrap().choices()[0].bullet,
            Bullet::MiddleNoLeft
        );
    }

    #[test]
    fn alon_reports_impossible_triples() {
        // all three conditions hold, which no chain can produce
        let bad = DifferenceGraph::from_edges(4, &[(1, 4), (1, 2), (2, 4), (1, 3)]).unwrap();
        assert!(matches!(select_triples(&bad), Err(Error::Invariant(_))));
        assert!(alon_witness(&bad).is_err());
    }

    #[test]
    fn best_prefers_larger_then_alon() {
        assert_eq!(best_witness(&path()).unwrap().indices(), &[1, 3]);
        let edgeless = DifferenceGraph::from_edges(3, &[]).unwrap();
        // greedy takes all three; alon picks one per triple
        assert_eq!(
            best_witness(&edgeless).unwrap().method(),
            Method::GreedyGood
        );
    }

    #[test]
    fn certify_rejects_dependent_sets() {
        let dg = path();
        assert!(
            WitnessSet::certify(&dg, vec![1, 2], Method::GreedyGood, Ratio::from_integer(1))
                .is_err()
        );
        assert!(
            WitnessSet::certify(&dg, vec![1], Method::GreedyGood, Ratio::from_integer(2)).is_err()
        );
        assert!(
            WitnessSet::certify(&dg, vec![], Method::GreedyGood, Ratio::from_integer(0)).is_err()
        );
        assert!(WitnessSet::certify(&dg, vec![1], Method::GreedyGood, Ratio::new(1, 2)).is_ok());
    }

    #[test]
    fn witness_document() {
        let dg = path();
        let w = alon_witness(&dg).unwrap();
        let text = write_witness(&w);
        assert_eq!(
            text,
            r#"{"format": "chaincliq-witness-v1", "method": "alon-triples", "indices": [1], "guarantee": "1"}"#
        );
        assert_eq!(read_witness(&text, &dg).unwrap(), w);
        let tampered = text.replace("[1]", "[1,2]");
        assert!(matches!(
            read_witness(&tampered, &dg),
            Err(Error::Invariant(_))
        ));
        assert!(read_witness(&text.replace("alon-triples", "magic"), &dg).is_err());
    }
}
