use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{EmbedError, Embedding, EmbeddingRecipe, Result};
use crate::bounds::eps;
use crate::metric::{euclidean, FiniteMetricSpace};
use crate::rng;

pub const DEFAULT_JL_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JlOptions {
    pub attempts: usize,
}

impl Default for JlOptions {
    fn default() -> Self {
        Self { attempts: DEFAULT_JL_ATTEMPTS }
    }
}

/// Gaussian random projection of an embedding into `R^m`.
pub fn jl_reduce<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    embedding: &Embedding,
    m: usize,
    rng: &mut R,
) -> Result<Embedding> {
    jl_reduce_with(space, embedding, m, rng, &JlOptions::default())
}

/// Projects with an `m x D` matrix of `N(0, 1/m)` entries.
///
/// A fresh matrix is drawn until every pair's length ratio lies in
/// `[sqrt(1 - eps), sqrt(1 + eps)]` with `eps = 2 sqrt(2 ln k / m)`. After
/// `attempts` failures the attempt whose worst ratio is closest to that band
/// is returned with `within_guarantee = false` in its recipe. Attempt `t`
/// uses stream `t` of a seed drawn once from `rng`.
pub fn jl_reduce_with<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    embedding: &Embedding,
    m: usize,
    rng: &mut R,
    opts: &JlOptions,
) -> Result<Embedding> {
    let k = embedding.k();
    if k != space.k() {
        return Err(EmbedError::ShapeMismatch(format!("{k} images for {} points", space.k())));
    }
    if k < 2 {
        return Err(EmbedError::TooFewPoints(k));
    }
    let ln_k = (k as f64).ln();
    let min = (8.0 * ln_k).ceil() as usize;
    if m <= min {
        return Err(EmbedError::DimensionTooSmall { m, min });
    }
    let eps = eps(m, ln_k);
    let (band_lo, band_hi) = ((1.0 - eps).sqrt(), (1.0 + eps).sqrt());
    let source = DMatrix::from_fn(embedding.m, k, |r, c| embedding.images[c][r]);
    let normal = Normal::new(0.0, 1.0 / (m as f64).sqrt()).expect("positive deviation");
    let base: u64 = rng.random();

    let attempts = opts.attempts.max(1);
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    let mut accepted = false;
    for t in 0..attempts {
        let mut stream = rng::stream_rng(base, t as u64);
        let g = DMatrix::from_fn(m, embedding.m, |_, _| normal.sample(&mut stream));
        let projected = &g * &source;
        let images: Vec<Vec<f64>> = (0..k).map(|c| projected.column(c).iter().copied().collect()).collect();
        let violation = band_violation(&embedding.images, &images, band_lo, band_hi);
        if best.as_ref().is_none_or(|(v, _)| violation < *v) {
            best = Some((violation, images));
        }
        if violation == 0.0 {
            accepted = true;
            break;
        }
    }
    let (_, images) = best.expect("at least one attempt");
    let recipe = EmbeddingRecipe::JlReduce {
        m,
        eps,
        attempts,
        within_guarantee: accepted,
        inner: Box::new(embedding.recipe.clone()),
    };
    Embedding::measured(space, images, recipe)
}

/// Largest distance of any pair ratio outside `[lo, hi]`; 0 inside the band.
fn band_violation(before: &[Vec<f64>], after: &[Vec<f64>], lo: f64, hi: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..before.len() {
        for j in i + 1..before.len() {
            let r = euclidean(&after[i], &after[j]) / euclidean(&before[i], &before[j]);
            worst = worst.max(lo - r).max(r - hi);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::identity_embed;
    use rand::Rng;

    fn cloud(k: usize, d: usize, seed: u64) -> FiniteMetricSpace {
        let mut r = rng::seeded(seed);
        FiniteMetricSpace::from_coords((0..k).map(|_| (0..d).map(|_| r.random::<f64>()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn dimension_floor() {
        let s = cloud(4, 3, 0);
        let e = identity_embed(&s, 3).unwrap();
        // ceil(8 ln 4) = 12
        assert_eq!(
            jl_reduce(&s, &e, 12, &mut rng::seeded(0)).unwrap_err(),
            EmbedError::DimensionTooSmall { m: 12, min: 12 }
        );
        assert!(jl_reduce(&s, &e, 13, &mut rng::seeded(0)).is_ok());
    }

    #[test]
    fn accepted_projection_respects_band() {
        let s = cloud(16, 64, 1);
        let e = identity_embed(&s, 64).unwrap();
        let r = jl_reduce(&s, &e, 60, &mut rng::seeded(2)).unwrap();
        let EmbeddingRecipe::JlReduce { eps, within_guarantee, .. } = r.recipe else { panic!() };
        assert!(within_guarantee);
        assert!(r.lip_lower >= (1.0 - eps).sqrt() && r.lip_upper <= (1.0 + eps).sqrt());
    }

    #[test]
    fn reproducible() {
        let s = cloud(10, 5, 3);
        let e = identity_embed(&s, 5).unwrap();
        let a = jl_reduce(&s, &e, 40, &mut rng::seeded(9)).unwrap();
        let b = jl_reduce(&s, &e, 40, &mut rng::seeded(9)).unwrap();
        assert_eq!(a, b);
    }
}
