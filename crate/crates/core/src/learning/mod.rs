//! Hypothesis classes on finite spaces: Lipschitz constants, losses,
//! discretization onto machine grids, weight-bounded ReLU networks, the
//! piecewise-linear trigonometric basis, and brute-force generalization gaps.

mod discretize;
mod gap;
mod hypothesis;
mod loss;
mod mlp;
mod riesz;

use thiserror::Error;

pub use discretize::{discretize_function, discretization_slack, lipschitz_on_grid, DiscreteFunction};
pub use gap::{risk, sup_gap, sup_gap_bruteforce, GapReport};
pub use hypothesis::{enumerate_class, lipschitz_upper, Hypothesis, MAX_CLASS_INPUTS, MAX_CLASS_OUTPUTS};
pub use loss::{LossFn, LossKind};
pub use mlp::{corollary_depth, general_depth, Layer, MlpDocument, ReluMlp};
pub use riesz::{riesz_eval, BasisKind, RieszTarget};

#[derive(Debug, Error, PartialEq)]
pub enum LearningError {
    #[error("class Y^X with |X| = {k_x}, |Y| = {k_y} is too large to enumerate")]
    ClassTooLarge { k_x: usize, k_y: usize },
    #[error("value {value} escapes the grid range [-{bound}, {bound}]")]
    RangeEscape { value: f64, bound: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Metric(#[from] crate::metric::MetricError),
    #[error(transparent)]
    Transport(#[from] crate::transport::TransportError),
}

pub type Result<T> = std::result::Result<T, LearningError>;
