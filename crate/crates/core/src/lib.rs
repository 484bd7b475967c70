//! Seasonally-integrated LSTM autoencoders for short-term precipitation
//! forecasting.
//!
//! The crate trains sequence-to-sequence LSTM models on daily weather tables
//! and produces multi-day precipitation forecasts. The flagship model runs two
//! autoencoder branches side by side — a short-term branch over the most
//! recent days and a seasonal branch over pooled long-window averages — and
//! combines their outputs into one forecast per horizon day.
//!
//! Everything is deterministic: random numbers come from a seeded [`rng::Rng`]
//! stream and repeated runs with the same seed produce bit-identical models,
//! histories, and reports.
//!
//! Module map:
//! - [`dataio`]: CSV loading, min-max scaling, moving windows, average
//!   pooling, the synthetic benchmark generator.
//! - [`nnkernel`]: LSTM cell forward/backward, dense heads, dropout masks,
//!   finite-difference utilities.
//! - [`seq2seq`]: encoder/decoder assembly for both decoder styles.
//! - [`ssae`]: the two-branch model and its combination modes.
//! - [`model`]: a variant-agnostic wrapper used by training, checkpoints,
//!   and the CLI.
//! - [`train`]: losses, Glorot init, Adam/RAdam, the minibatch fit loop.
//! - [`eval`]: RMSE/correlation reports, permutation importance, Monte Carlo
//!   dropout bands.
//! - [`checkpoint`] / [`config`] / [`pipeline`]: JSON persistence, run
//!   configuration, and end-to-end helpers shared by the CLI and tests.

pub mod checkpoint;
pub mod config;
pub mod dataio;
pub mod error;
pub mod gradcheck;
pub mod linalg;
pub mod model;
pub mod nnkernel;
pub mod pipeline;
pub mod rng;
pub mod seq2seq;
pub mod ssae;
pub mod tensors;
pub mod train;
pub mod eval;

pub use error::{Error, Result};

/// Crate version string, also exposed through the C ABI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
