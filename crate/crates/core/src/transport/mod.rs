//! Discrete measures, total variation and exact 1-Wasserstein distances.

mod measure;
mod simplex;

use thiserror::Error;

pub use measure::{
    empirical, graph_pushforward, sample, sample_with, tv_distance, Coupling, DiscreteMeasure, MeasureDocument,
    SampleBatch, WEIGHT_SUM_TOLERANCE,
};
pub use simplex::{
    transport_simplex, wasserstein_1d_oracle, wasserstein_exact, wasserstein_with, SolverOptions, TransportPlan,
};

#[derive(Debug, Error, PartialEq)]
pub enum TransportError {
    #[error("measures live on spaces of size {left} and {right}")]
    MarginalMismatch { left: usize, right: usize },
    #[error("space does not carry one-dimensional coordinates")]
    NotOneDimensional,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("transport solver failed: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, TransportError>;
