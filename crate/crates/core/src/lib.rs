//! Concentration and generalization bounds for learning on finite metric
//! spaces.
//!
//! The crate is organized bottom-up: [`metric`] holds finite spaces and
//! machine grids, [`embed`] embeds them into Euclidean space with measured
//! distortion, [`transport`] computes exact Wasserstein-1 distances,
//! [`bounds`] evaluates the closed-form bounds and their competitors,
//! [`learning`] provides hypothesis classes and losses, and [`experiments`]
//! runs the Monte-Carlo audits that the command-line tool exposes.

pub mod bounds;
pub mod embed;
pub mod experiments;
pub mod learning;
pub mod metric;
pub mod rng;
pub mod transport;
