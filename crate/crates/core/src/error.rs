use thiserror::Error;

use crate::blossom::BlossomId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {{{u}, {v}}} not present")]
    MissingEdge { u: usize, v: usize },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<GraphError>,
    },
}

impl GraphError {
    pub(crate) fn at_line(self, line: usize) -> GraphError {
        GraphError::AtLine {
            line,
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("edge {{{u}, {v}}} is not in the graph")]
    NotAnEdge { u: usize, v: usize },
    #[error("vertex {vertex} is covered twice")]
    SharedVertex { vertex: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("path has odd vertex count {0}; augmenting paths have an even number of vertices")]
    OddLength(usize),
    #[error("endpoint {0} is not free")]
    EndpointNotFree(usize),
    #[error("vertex {0} repeats on the path")]
    RepeatedVertex(usize),
    #[error("{{{u}, {v}}} is not an edge of the graph")]
    MissingEdge { u: usize, v: usize },
    #[error("edge {{{u}, {v}}} breaks alternation at position {position}")]
    NotAlternating { u: usize, v: usize, position: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlossomError {
    #[error("vertex {0} is not covered by the blossom set")]
    UnknownVertex(usize),
    #[error("vertex {target} is not a member of blossom {blossom}")]
    TargetNotInBlossom { blossom: BlossomId, target: usize },
    #[error("blossom {0} is stale or not a root blossom")]
    StaleBlossom(BlossomId),
    #[error("path enters blossom {blossom} at {entry} and leaves at {exit}, neither of which is its base")]
    InconsistentView {
        blossom: BlossomId,
        entry: usize,
        exit: usize,
    },
    #[error("tree node {0} is not an outer vertex")]
    NotOuter(BlossomId),
    #[error("tree nodes {0} and {1} lie in different trees")]
    DifferentTrees(BlossomId, BlossomId),
    #[error("arc endpoints share root blossom {0}")]
    SameBlossom(BlossomId),
    #[error("invalid blossom: {0}")]
    Invalid(String),
}

/// Precondition failures of the basic structure operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("vertex {0} is not free")]
    NotFree(usize),
    #[error("vertex {0} is removed")]
    Removed(usize),
    #[error("{{{u}, {v}}} is not an unmatched edge of the graph")]
    NotUnmatchedEdge { u: usize, v: usize },
    #[error("AUGMENT needs outer endpoints in two different structures: {0}")]
    Augment(String),
    #[error("CONTRACT precondition failed: {0}")]
    Contract(String),
    #[error("OVERTAKE (P1): root blossom of {0} is not a working vertex")]
    OvertakeP1(usize),
    #[error("OVERTAKE (P2): {0}")]
    OvertakeP2(String),
    #[error("OVERTAKE (P3): k = {k} is not below the current label {label}")]
    OvertakeP3 { k: u32, label: u32 },
    #[error("root blossom of {0} is not a working vertex")]
    NotWorking(usize),
    #[error(transparent)]
    Blossom(#[from] BlossomError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("epsilon must lie in (0, 1/4], got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("internal consistency violated: {0}")]
    Internal(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("chunk has {got} updates, expected exactly {expected}")]
    ChunkSize { expected: usize, got: usize },
    #[error("invalid update at record {record}: {reason}")]
    InvalidUpdate { record: usize, reason: String },
    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
