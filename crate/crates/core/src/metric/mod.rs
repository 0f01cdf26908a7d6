//! Finite metric spaces, products, dyadic machine grids and packings.

mod grid;
mod packing;
mod space;

use thiserror::Error;

pub use grid::{round_by_scan, DyadicGrid, GridDocument};
pub use packing::{greedy_packing, PackingDocument, PackingSet, DEFAULT_AUDIT_BUDGET};
pub use space::{
    euclidean, product_space, product_space_with_cap, FiniteMetricSpace, SpaceDocument,
    EXHAUSTIVE_TRIANGLE_LIMIT, SAMPLED_TRIANGLES, TRIANGLE_TOLERANCE,
};

/// Largest number of points a space may have unless a caller raises the cap.
pub const DEFAULT_CARDINALITY_CAP: usize = 20_000;

/// Metric axiom named in a [`MetricError::MetricViolation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Identity,
    Symmetry,
    Positivity,
    Triangle,
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("space would have {count} points, above the cap of {cap}")]
    CardinalityOverflow { count: f64, cap: usize },
    #[error("{axiom:?} axiom violated at {witness:?}")]
    MetricViolation { axiom: Axiom, witness: (usize, usize, usize) },
    #[error("maximality audit drew {candidates} candidates without {budget} consecutive rejections")]
    BudgetExhausted { candidates: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, MetricError>;
