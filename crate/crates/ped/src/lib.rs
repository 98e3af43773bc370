//! IO, experiments and the command line on top of `pedigree-core`.

pub mod config;
pub mod error;
pub mod formats;
pub mod harness;
pub mod stats;

pub use config::ExperimentConfig;
pub use error::PedError;
pub use harness::{monte_carlo, AggregateStats};
