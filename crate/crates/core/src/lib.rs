//! Pedigree encodings of tours, the pedigree graph and its adjacency
//! criterion, and the Alice-vs-Bob connectivity game.
//!
//! Everything here is `no_std` with `alloc`; IO and the command line live in
//! the companion `pedigree` crate.

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cycle;
pub mod error;
pub mod game;
pub mod graph;
pub mod pair;
pub mod pedigree;
pub mod polytope;
pub mod simplex;
pub mod strategy;
pub mod union_find;

pub use cycle::{EvolvingCycle, Nu};
pub use error::{CycleError, GameError, GraphError, PolytopeError, StrategyError};
pub use game::{GameState, MoveClass, MoveKind, RoundOutcome, TransitionTable};
pub use graph::{EdgeTag, PedigreeGraph, TypedEdge};
pub use pair::{Node, NodePair};
pub use pedigree::Pedigree;
pub use strategy::{Strategy, StrategyRegistry};
