//! Closed-form concentration and generalization bounds.
//!
//! Point counts and sample sizes are carried as natural logarithms so that
//! `k = 10^15` or `N = 10^24` never overflow. `log` means the natural
//! logarithm except in the `m = 2` rate, which uses `log2 N`.

mod competitors;
mod inputs;
mod table;

use thiserror::Error;

pub use competitors::{
    classifier_lip_bound, occam_bound, rademacher_bound, relu_corollary_bound, stability_bound, ClassifierLipschitz,
    RademacherTerms, ReluCorollary, RELU_CONSTANT_CAVEAT,
};
pub use inputs::BoundInputs;
pub use table::{
    best_bound_over_m, concentration_bounds, dim_const, eps, eps_tilde, estimation_bound, generalization_bound,
    rate_r, worstcase_tau, BestBound, ConcentrationBounds, RateTableRow, Regime,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("outside the formula's domain: {0}")]
    DomainError(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, BoundError>;
