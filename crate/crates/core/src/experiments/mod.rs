//! Experiment drivers behind the command-line tool: analytic bound tables,
//! Monte-Carlo concentration and generalization-gap studies, embedding
//! audits and figure data.
//!
//! Replicate `r` at grid position `i` always draws from stream
//! `(i << 32) | r` of the configured seed, and results are gathered in
//! replicate order, so output does not depend on the thread count.

mod bounds;
mod concentration;
mod config;
mod embed_audit;
mod figure;
mod gap;
mod table;
mod wasserstein;

use thiserror::Error;

pub use bounds::{bound_inputs, run_bounds, BoundsReport, BoundsRow};
pub use concentration::{run_concentration, ConcentrationSummary};
pub use config::{
    AuditConfig, AuditMetric, BoundsConfig, ConcentrationConfig, EmbeddingChoice, ExperimentConfig, FigureConfig, GapConfig, MeasureSource, NGrid,
    SpaceSource, Thresholds, WassersteinConfig,
};
pub use embed_audit::{run_embed_audit, AuditSummary};
pub use figure::{figure_curves, phase_diagram, run_figure, FigureData, FigureName, FigurePoint, PhaseRow};
pub use gap::{run_gap, GapSummary};
pub use table::{config_hash, Assertion, Metadata, ResultRow, ResultTable};
pub use wasserstein::{run_wasserstein, WassersteinReport};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("unknown figure `{0}` (expected risk-bound-small, risk-bound-large or phase-diagram)")]
    UnknownFigure(String),
    #[error(transparent)]
    Metric(#[from] crate::metric::MetricError),
    #[error(transparent)]
    Embed(#[from] crate::embed::EmbedError),
    #[error(transparent)]
    Transport(#[from] crate::transport::TransportError),
    #[error(transparent)]
    Bound(#[from] crate::bounds::BoundError),
    #[error(transparent)]
    Learning(#[from] crate::learning::LearningError),
}

impl ExperimentError {
    pub(crate) fn config(path: &str, message: impl Into<String>) -> Self {
        Self::Config { path: path.to_string(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Stream index for replicate `r` at grid position `i`.
pub(crate) fn replicate_stream(i: usize, r: usize) -> u64 {
    ((i as u64) << 32) | r as u64
}

/// Stream reserved for materializing random spaces and measures.
pub(crate) const SETUP_STREAM: u64 = u64::MAX;
