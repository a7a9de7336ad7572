//! Simulated annealing over chains of fixed length, minimizing the independence
//! ratio `alpha / r` of the derived graph, and the line-delimited record file.
//!
//! A chain of length `r` is handled through its insertion steps: every edge slot
//! stores the first index at which the edge appears, or `r + 1` if it never does.
//! The chain is strict exactly when each of the steps `2..=r` receives at least
//! one edge.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_rational::Ratio;
use rand::Rng;
use serde::Deserialize;

use crate::chain::{
    below, random_chain, relabel_chain, seeded_rng, shuffle, validate_chain, write_chain, ChainDoc,
    GraphChain, StepDistribution,
};
use crate::derived::build_difference_graph;
use crate::error::{Error, Result};
use crate::graph::{edge_slots, EdgeSet, Graph};
use crate::json::{check_format, ObjectWriter};
use crate::oracle::{max_independent_set, MIS_CUTOFF};
use crate::witness::alon_bound;

pub const RECORD_FORMAT: &str = "chaincliq-record-v1";

/// Mixed into the seed so the move stream differs from the start-chain stream.
const MOVE_STREAM: u64 = 0xA076_1D64_78BD_642F;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveWeights {
    pub resplit: f64,
    pub swap: f64,
    pub relabel: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        MoveWeights {
            resplit: 4.0,
            swap: 4.0,
            relabel: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub n: usize,
    pub r: usize,
    /// Number of proposed moves, valid or not.
    pub budget: u64,
    pub seed: u64,
    pub initial_temperature: f64,
    /// Geometric decay applied to the temperature after every move.
    pub cooling: f64,
    pub weights: MoveWeights,
}

impl SearchConfig {
    pub fn new(n: usize, r: usize, budget: u64, seed: u64) -> Self {
        SearchConfig {
            n,
            r,
            budget,
            seed,
            initial_temperature: 0.1,
            cooling: 0.9995,
            weights: MoveWeights::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::Config("initial temperature must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling <= 1.0) {
            return Err(Error::Config("cooling factor must lie in (0,1]".into()));
        }
        let w = [
            self.weights.resplit,
            self.weights.swap,
            self.weights.relabel,
        ];
        if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) || w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config(
                "move weights must be nonnegative and not all zero".into(),
            ));
        }
        if self.r > MIS_CUTOFF {
            return Err(Error::CutoffExceeded {
                what: "r",
                value: self.r,
                cutoff: MIS_CUTOFF,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchRecord {
    pub chain: GraphChain,
    pub alpha: usize,
    pub ratio: Ratio<u64>,
    pub seed: u64,
    pub budget: u64,
    /// Moves proposed before the best chain was first reached; replaying the
    /// search with this budget ends on the same chain.
    pub move_trace_length: u64,
    /// Left empty by the search itself so records stay reproducible.
    pub timestamp: Option<String>,
}

impl SearchRecord {
    pub fn new(
        chain: GraphChain,
        alpha: usize,
        seed: u64,
        budget: u64,
        move_trace_length: u64,
    ) -> Self {
        let ratio = Ratio::new(alpha as u64, chain.r() as u64);
        SearchRecord {
            chain,
            alpha,
            ratio,
            seed,
            budget,
            move_trace_length,
            timestamp: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    Resplit,
    Swap,
    Relabel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// Shift one edge slot's insertion step by one.
    Resplit { slot: usize, later: bool },
    /// Exchange the insertion steps of two edge slots.
    Swap { a: usize, b: usize },
    /// Relabel vertices, `v -> perm[v-1]`.
    Relabel { perm: Vec<usize> },
}

pub fn sample_move<R: Rng>(rng: &mut R, kind: MoveKind, n: usize) -> Move {
    let slots = edge_slots(n).max(1);
    match kind {
        MoveKind::Resplit => Move::Resplit {
            slot: below(rng, slots),
            later: rng.random::<bool>(),
        },
        MoveKind::Swap => Move::Swap {
            a: below(rng, slots),
            b: below(rng, slots),
        },
        MoveKind::Relabel => {
            let mut perm: Vec<usize> = (1..=n).collect();
            shuffle(rng, &mut perm);
            Move::Relabel { perm }
        }
    }
}

fn insertion_steps(c: &GraphChain) -> Vec<usize> {
    let r = c.r();
    let n = c.n();
    let mut steps = vec![r + 1; edge_slots(n)];
    for i in (1..=r).rev() {
        for s in slot_indices(c.graph(i).edges()) {
            steps[s] = i;
        }
    }
    steps
}

fn slot_indices(edges: &EdgeSet) -> Vec<usize> {
    let n = edges.n();
    edges
        .iter()
        .map(|e| (e.u() - 1) * n - (e.u() - 1) * e.u() / 2 + (e.v() - e.u() - 1))
        .collect()
}

fn chain_from_steps(n: usize, r: usize, steps: &[usize]) -> Option<GraphChain> {
    let mut per_step = vec![0usize; r + 2];
    for &s in steps {
        per_step[s] += 1;
    }
    if per_step[2..=r].contains(&0) {
        return None;
    }
    let all: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
        .collect();
    let graphs = (1..=r)
        .map(|i| {
            let edges = all
                .iter()
                .zip(steps)
                .filter(|(_, &s)| s <= i)
                .map(|(&e, _)| e);
            EdgeSet::from_pairs(n, edges).map(Graph::from)
        })
        .collect::<Result<Vec<_>>>()
        .ok()?;
    validate_chain(n, graphs).ok()
}

/// Applies `mv` to `c`, or `None` when the result would not be a strict chain
/// (or the move is a no-op).
pub fn apply_move(c: &GraphChain, mv: &Move) -> Option<GraphChain> {
    let (n, r) = (c.n(), c.r());
    let slots = edge_slots(n);
    match mv {
        Move::Relabel { perm } => relabel_chain(c, perm).ok(),
        Move::Resplit { slot, later } => {
            if *slot >= slots {
                return None;
            }
            let mut steps = insertion_steps(c);
            let s = steps[*slot];
            steps[*slot] = match later {
                true if s <= r => s + 1,
                false if s > 1 => s - 1,
                _ => return None,
            };
            chain_from_steps(n, r, &steps)
        }
        Move::Swap { a, b } => {
            if *a >= slots || *b >= slots {
                return None;
            }
            let mut steps = insertion_steps(c);
            if steps[*a] == steps[*b] {
                return None;
            }
            steps.swap(*a, *b);
            chain_from_steps(n, r, &steps)
        }
    }
}

fn alpha_of(c: &GraphChain) -> Result<usize> {
    Ok(max_independent_set(&build_difference_graph(c))?.alpha)
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub record: SearchRecord,
    /// `(move number, alpha)` at every improvement of the best chain, starting
    /// with the initial chain at move 0.
    pub best_trace: Vec<(u64, usize)>,
    pub accepted_moves: u64,
}

pub fn local_search_min_ratio(cfg: &SearchConfig) -> Result<SearchRecord> {
    anneal(cfg).map(|o| o.record)
}

/// Runs the annealing loop. Deterministic in `cfg`.
pub fn anneal(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let mut current = random_chain(cfg.n, cfg.r, StepDistribution::Single, cfg.seed)?;
    let mut rng = seeded_rng(cfg.seed ^ MOVE_STREAM);
    let r = cfg.r as f64;
    let floor = alon_bound(cfg.r);

    let mut current_alpha = alpha_of(&current)?;
    let mut best = current.clone();
    let mut best_alpha = current_alpha;
    let mut best_at = 0;
    let mut best_trace = vec![(0, best_alpha)];
    let mut accepted_moves = 0;

    let w = cfg.weights;
    let total_weight = w.resplit + w.swap + w.relabel;
    let mut temperature = cfg.initial_temperature;

    for step in 1..=cfg.budget {
        if best_alpha <= floor {
            // proven minimum reached
            break;
        }
        let pick = rng.random::<f64>() * total_weight;
        let kind = if pick < w.resplit {
            MoveKind::Resplit
        } else if pick < w.resplit + w.swap {
            MoveKind::Swap
        } else {
            MoveKind::Relabel
        };
        let mv = sample_move(&mut rng, kind, cfg.n);
        let t = temperature;
        temperature *= cfg.cooling;
        let Some(candidate) = apply_move(&current, &mv) else {
            continue;
        };
        let alpha = alpha_of(&candidate)?;
        let delta = (alpha as f64 - current_alpha as f64) / r;
        if delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp() {
            current = candidate;
            current_alpha = alpha;
            accepted_moves += 1;
            if alpha < best_alpha {
                best = current.clone();
                best_alpha = alpha;
                best_at = step;
                best_trace.push((step, alpha));
            }
        }
    }

    Ok(SearchOutcome {
        record: SearchRecord::new(best, best_alpha, cfg.seed, cfg.budget, best_at),
        best_trace,
        accepted_moves,
    })
}

pub fn write_record(rec: &SearchRecord) -> String {
    let mut w = ObjectWriter::new(RECORD_FORMAT);
    w.raw("chain", &write_chain(&rec.chain))
        .value("alpha", &rec.alpha)
        .value("ratio", &rec.ratio.to_string())
        .value("seed", &rec.seed)
        .value("budget", &rec.budget)
        .value("move_trace_length", &rec.move_trace_length)
        .value("timestamp", &rec.timestamp);
    w.finish()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordDoc {
    format: String,
    chain: ChainDoc,
    alpha: usize,
    ratio: String,
    seed: u64,
    budget: u64,
    move_trace_length: u64,
    timestamp: Option<String>,
}

/// Parses one record; checks the chain and that `ratio == alpha / r`.
pub fn read_record(text: &str) -> Result<SearchRecord> {
    let doc: RecordDoc = serde_json::from_str(text)?;
    check_format(RECORD_FORMAT, &doc.format)?;
    let chain = doc.chain.into_chain()?;
    let ratio = doc
        .ratio
        .parse::<Ratio<u64>>()
        .map_err(|e| Error::Config(format!("ratio {:?}: {e}", doc.ratio)))?;
    if doc.alpha > chain.r() || ratio != Ratio::new(doc.alpha as u64, chain.r() as u64) {
        return Err(Error::Invariant(format!(
            "ratio {ratio} does not equal alpha {} over r {}",
            doc.alpha,
            chain.r()
        )));
    }
    Ok(SearchRecord {
        chain,
        alpha: doc.alpha,
        ratio,
        seed: doc.seed,
        budget: doc.budget,
        move_trace_length: doc.move_trace_length,
        timestamp: doc.timestamp,
    })
}

/// Appends one record as a single line, written with one `write_all`.
pub fn append_record(path: &Path, rec: &SearchRecord) -> Result<()> {
    let mut line = write_record(rec);
    line.push('\n');
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(line.as_bytes())?;
    Ok(())
}

/// Loads every record; blank lines are skipped. With `verify`, alpha is
/// recomputed by the oracle and the ratio is checked against the proven floor.
pub fn load_records(path: &Path, verify: bool) -> Result<Vec<SearchRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = read_record(&line).map_err(|e| Error::MalformedLine {
            line: line_no,
            source: Box::new(e),
        })?;
        if verify {
            verify_record(&rec).map_err(|e| match e {
                Error::AlphaMismatch { stored, actual, .. } => Error::AlphaMismatch {
                    line: line_no,
                    stored,
                    actual,
                },
                other => Error::MalformedLine {
                    line: line_no,
                    source: Box::new(other),
                },
            })?;
        }
        records.push(rec);
    }
    Ok(records)
}

/// Recomputes alpha and checks `ratio >= max(1, ceil(floor(r/3)/2)) / r`.
pub fn verify_record(rec: &SearchRecord) -> Result<()> {
    let actual = alpha_of(&rec.chain)?;
    if actual != rec.alpha {
        return Err(Error::AlphaMismatch {
            line: 0,
            stored: rec.alpha,
            actual,
        });
    }
    let r = rec.chain.r() as u64;
    if rec.ratio < Ratio::new(alon_bound(rec.chain.r()) as u64, r) {
        return Err(Error::Invariant(format!(
            "ratio {} below the proven floor for r = {r}",
            rec.ratio
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_space_n2_r2() {
        let rec = local_search_min_ratio(&SearchConfig::new(2, 2, 50, 3)).unwrap();
        assert_eq!(rec.ratio, Ratio::new(1, 2));
        assert_eq!(rec.alpha, 1);
    }

    #[test]
    fn insertion_steps_round_trip() {
        let geo = StepDistribution::geometric(0.4).unwrap();
        for seed in 0..30 {
            let c = random_chain(6, 8, geo, seed).unwrap();
            let steps = insertion_steps(&c);
            assert_eq!(chain_from_steps(6, 8, &steps).unwrap(), c);
        }
    }

    #[test]
    fn moves_keep_chains_valid() {
        let mut rng = seeded_rng(11);
        let mut c = random_chain(5, 8, StepDistribution::Single, 1).unwrap();
        for k in 0..500 {
            let kind = [MoveKind::Resplit, MoveKind::Swap, MoveKind::Relabel][k % 3];
            let mv = sample_move(&mut rng, kind, 5);
            if let Some(next) = apply_move(&c, &mv) {
                assert_eq!(next.r(), 8);
                assert!(validate_chain(5, next.graphs().to_vec()).is_ok());
                c = next;
            }
        }
    }

    #[test]
    fn resplit_that_empties_a_step_is_rejected() {
        // single steps: every step 2..=r holds exactly one edge
        let c = random_chain(3, 4, StepDistribution::Single, 0).unwrap();
        let steps = insertion_steps(&c);
        let slot = steps.iter().position(|&s| s == 3).unwrap();
        assert_eq!(apply_move(&c, &Move::Resplit { slot, later: true }), None);
        assert_eq!(apply_move(&c, &Move::Resplit { slot, later: false }), None);
        // the last step's edge can leave the chain only if another edge stays
        assert_eq!(apply_move(&c, &Move::Swap { a: slot, b: slot }), None);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SearchConfig::new(5, 8, 0, 1);
        assert!(matches!(anneal(&cfg), Err(Error::Config(_))));
        cfg.budget = 10;
        cfg.cooling = 0.0;
        assert!(anneal(&cfg).is_err());
        cfg.cooling = 0.9;
        cfg.weights = MoveWeights {
            resplit: 0.0,
            swap: 0.0,
            relabel: 0.0,
        };
        assert!(anneal(&cfg).is_err());
        assert!(matches!(
            anneal(&SearchConfig::new(2, 3, 10, 1)),
            Err(Error::LengthOutOfRange { .. })
        ));
        assert!(matches!(
            anneal(&SearchConfig::new(12, 65, 10, 1)),
            Err(Error::CutoffExceeded { .. })
        ));
    }

    #[test]
    fn best_trace_is_monotone() {
        let out = anneal(&SearchConfig::new(6, 12, 2_000, 9)).unwrap();
        assert!(out
            .best_trace
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
        assert_eq!(out.best_trace.last().unwrap().1, out.record.alpha);
        assert_eq!(
            out.best_trace.last().unwrap().0,
            out.record.move_trace_length
        );
    }

    #[test]
    fn record_document_checks_ratio() {
        let rec = local_search_min_ratio(&SearchConfig::new(4, 5, 100, 2)).unwrap();
        let text = write_record(&rec);
        assert!(text.starts_with(r#"{"format": "chaincliq-record-v1", "chain": {"format": "chaincliq-chain-v1", "n": 4, "#));
        assert!(text.ends_with(r#", "timestamp": null}"#));
        assert_eq!(read_record(&text).unwrap(), rec);
        let wrong = text.replace(
            &format!("\"ratio\": \"{}\"", rec.ratio),
            "\"ratio\": \"5/7\"",
        );
        assert!(matches!(read_record(&wrong), Err(Error::Invariant(_))));
    }
}
