//! Bi-Lipschitz embeddings of finite metric spaces into Euclidean space,
//! with exactly measured distortion.

mod bourgain;
mod distortion;
mod jl;
mod line;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bourgain::{bourgain_embed, bourgain_shape};
pub use distortion::{measure_distortion, Distortion};
pub use jl::{jl_reduce, jl_reduce_with, JlOptions, DEFAULT_JL_ATTEMPTS};
pub use line::{compose, identity_embed, line_embed_heuristic};

use crate::metric::FiniteMetricSpace;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("points {0:?} have identical images")]
    NotInjective((usize, usize)),
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("a whole density level sampled only empty subsets")]
    DegenerateSample,
    #[error("target dimension {m} must exceed {min}")]
    DimensionTooSmall { m: usize, min: usize },
    #[error("space carries no Euclidean coordinates")]
    NoCoordinates,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, EmbedError>;

/// How an embedding was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingRecipe {
    Bourgain { levels: usize, repetitions: usize, coordinates: usize },
    JlReduce { m: usize, eps: f64, attempts: usize, within_guarantee: bool, inner: Box<EmbeddingRecipe> },
    Identity { m: usize },
    LineHeuristic,
    Compose { outer: String, inner: Box<EmbeddingRecipe> },
}

/// Images of the points `0..k` of a source space in `R^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub m: usize,
    pub images: Vec<Vec<f64>>,
    pub lip_lower: f64,
    pub lip_upper: f64,
    pub tau: f64,
    pub recipe: EmbeddingRecipe,
}

impl Embedding {
    /// Measures `images` against `space` and packages the result.
    pub fn measured(space: &FiniteMetricSpace, images: Vec<Vec<f64>>, recipe: EmbeddingRecipe) -> Result<Self> {
        let m = images.first().map_or(0, Vec::len);
        if images.iter().any(|r| r.len() != m) {
            return Err(EmbedError::ShapeMismatch("image rows of mixed dimension".into()));
        }
        let d = measure_distortion(&images, space)?;
        Ok(Self { m, images, lip_lower: d.lip_lower, lip_upper: d.lip_upper, tau: d.tau, recipe })
    }

    pub fn k(&self) -> usize {
        self.images.len()
    }
}
