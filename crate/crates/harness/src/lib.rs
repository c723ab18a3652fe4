//! Experiment runner for the `rud-core` optimizers: region maps, scalar
//! trajectories, the random-quadratic benchmark, autoencoder training and a
//! built-in self-check.

pub mod cli;
pub mod commands;
pub mod output;
pub mod selfcheck;
pub mod synth;

/// Invalid command-line input; `rudbench` exits with status 2 on these.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);
