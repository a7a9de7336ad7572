use thiserror::Error;

use crate::derived::LemmaViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count {n} outside supported range 1..={max}")]
    VertexCount { n: usize, max: usize },
    #[error("edge ({u},{v}) has an endpoint outside 1..={n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({u},{v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex counts differ: {left} vs {right}")]
    VertexCountMismatch { left: usize, right: usize },
    #[error("first graph is not a subgraph of the second")]
    NotSubgraph,

    #[error("chain must contain at least one graph")]
    EmptyChain,
    #[error("graphs {index} and {next} are not nested", next = index + 1)]
    NotNested { index: usize },
    #[error("graphs {index} and {next} are equal", next = index + 1)]
    NotDistinct { index: usize },
    #[error(
        "r = {r} out of range: r must satisfy 1 <= r <= C(n,2)+1 = {max} (r exceeds C(n,2)+1)"
    )]
    LengthOutOfRange { r: usize, max: usize },
    #[error("invalid step distribution: {0}")]
    StepDistribution(String),

    #[error("index {index} outside 1..={r}")]
    IndexOutOfRange { index: usize, r: usize },
    #[error("{what} = {value} exceeds cutoff {cutoff}")]
    CutoffExceeded {
        what: &'static str,
        value: usize,
        cutoff: usize,
    },
    #[error("lemma violated: {0}")]
    Lemma(LemmaViolation),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error("invalid search configuration: {0}")]
    Config(String),

    #[error("expected format tag {expected:?}, found {found:?}")]
    FormatTag {
        expected: &'static str,
        found: String,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {source}")]
    MalformedLine { line: usize, source: Box<Error> },
    #[error("line {line}: stored alpha {stored} but oracle gives {actual}")]
    AlphaMismatch {
        line: usize,
        stored: usize,
        actual: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
