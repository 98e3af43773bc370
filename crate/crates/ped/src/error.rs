use pedigree_core::{CycleError, GameError, GraphError, Node, PolytopeError, StrategyError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PedError {
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
    /// A hard invariant failed; the triple replays the game.
    #[error("assertion failed (seed {seed}, game {game}, round {round}): {message}")]
    Assertion { seed: u64, game: u64, round: Node, message: String },
    #[error("conformance failure: {0}")]
    Conformance(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl PedError {
    /// Process exit code: 1 domain, 2 assertion or conformance, 3 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            PedError::Assertion { .. } | PedError::Conformance(_) => 2,
            PedError::Io(_) => 3,
            _ => 1,
        }
    }
}
