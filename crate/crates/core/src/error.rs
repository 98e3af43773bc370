use alloc::string::String;

use thiserror::Error;

use crate::graph::EdgeTag;
use crate::pair::{Node, NodePair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("pair {{{0},{0}}} has identical endpoints")]
    DegeneratePair(Node),
    #[error("node {node} is outside [1, {n}]")]
    NodeOutOfRange { node: Node, n: Node },
    #[error("edge index {index} is outside [1, {n}]")]
    EdgeIndexOutOfRange { index: Node, n: Node },
    #[error("{0} is not an edge of the cycle")]
    NotAnEdge(NodePair),
    #[error("cycles need at least 3 nodes, got {0}")]
    TooFewNodes(Node),
    #[error("choice c_{k} = {choice} is outside [1, {k}]")]
    BadChoice { k: Node, choice: Node },
    #[error("expected {expected} insertion entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("sequence is not a cyclic order of [1, {0}]")]
    NotACycle(Node),
    #[error("malformed pedigree string: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("pedigrees have different sizes ({a} vs {b})")]
    SizeMismatch { a: Node, b: Node },
    #[error("pedigree graphs need n >= 4, got {0}")]
    TooFewNodes(Node),
    #[error("node {0} is not a vertex of the pedigree graph")]
    NotAVertex(Node),
    #[error("graph is at time {graph}, cannot extend with cycles at time {cycle}")]
    TimeMismatch { graph: Node, cycle: Node },
    #[error("identical pedigree: both cycles are the same polytope vertex")]
    IdenticalPedigree,
    #[error("{tag} edge from vertex {vertex} targets non-vertex {target}")]
    TargetNotVertex { vertex: Node, target: Node, tag: EdgeTag },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("script covers nodes up to {len}, node {needed} requested")]
    ScriptExhausted { needed: Node, len: Node },
    #[error("unknown strategy `{0}`")]
    Unknown(String),
    #[error("bad strategy parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("{0} is not an edge of Alice's cycle")]
    NotAliceEdge(NodePair),
    #[error("{0} is not an edge of Bob's cycle")]
    NotBobEdge(NodePair),
    #[error("game needs n_max >= 4, got {0}")]
    HorizonTooShort(Node),
    #[error("Bob's script ends before node {0}")]
    BobScriptExhausted(Node),
    #[error("observer aborted the game at node {0}")]
    Aborted(Node),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("pedigree vectors need n >= 4, got {0}")]
    TooFewNodes(Node),
    #[error("u and v are the same vertex")]
    SameVertex,
    #[error("vertex set has {got} points, expected all {expected} pedigrees")]
    IncompleteVertexSet { expected: usize, got: usize },
    #[error("vertex is not a member of the supplied vertex set")]
    NotInSet,
    #[error("vectors of different sizes ({0} vs {1})")]
    SizeMismatch(Node, Node),
    #[error("n = {0} is outside the supported range [4, 7]")]
    UnsupportedSize(Node),
}
