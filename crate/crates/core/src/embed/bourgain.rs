use rand::Rng;

use super::{EmbedError, Embedding, EmbeddingRecipe, Result};
use crate::metric::FiniteMetricSpace;

/// Redraws allowed for one empty subset before its coordinate is dropped.
const EMPTY_SUBSET_RETRIES: usize = 16;
/// Full redraws allowed when the sampled coordinates fail to separate points.
const INJECTIVITY_RETRIES: usize = 16;

/// `(levels, repetitions)` = `(floor(log2 k) + 1, ceil(24 ln k))`.
pub fn bourgain_shape(k: usize) -> (usize, usize) {
    let levels = (usize::BITS - k.leading_zeros()) as usize;
    let reps = (24.0 * (k as f64).ln()).ceil() as usize;
    (levels, reps.max(1))
}

/// Frechet embedding with coordinates `d(x, S_ij)`.
///
/// Level `i` keeps each point independently with probability `2^-i`; each
/// level is sampled `ceil(24 ln k)` times. The images are divided by the
/// number of coordinates.
pub fn bourgain_embed<R: Rng + ?Sized>(space: &FiniteMetricSpace, rng: &mut R) -> Result<Embedding> {
    let k = space.k();
    if k < 2 {
        return Err(EmbedError::TooFewPoints(k));
    }
    let (levels, reps) = bourgain_shape(k);
    let mut last = None;
    for _ in 0..INJECTIVITY_RETRIES {
        let subsets = draw_subsets(k, levels, reps, rng)?;
        let scale = 1.0 / subsets.len() as f64;
        let images: Vec<Vec<f64>> = (0..k)
            .map(|x| {
                subsets
                    .iter()
                    .map(|s| scale * s.iter().map(|&y| space.d(x, y)).fold(f64::INFINITY, f64::min))
                    .collect()
            })
            .collect();
        let recipe = EmbeddingRecipe::Bourgain { levels, repetitions: reps, coordinates: subsets.len() };
        match Embedding::measured(space, images, recipe) {
            Err(EmbedError::NotInjective(pair)) => last = Some(pair),
            other => return other,
        }
    }
    Err(EmbedError::NotInjective(last.expect("at least one attempt")))
}

fn draw_subsets<R: Rng + ?Sized>(k: usize, levels: usize, reps: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    let mut subsets = Vec::with_capacity(levels * reps);
    for i in 1..=levels {
        let p = 0.5f64.powi(i as i32);
        let before = subsets.len();
        for _ in 0..reps {
            for _ in 0..=EMPTY_SUBSET_RETRIES {
                let s: Vec<usize> = (0..k).filter(|_| rng.random_bool(p)).collect();
                if !s.is_empty() {
                    subsets.push(s);
                    break;
                }
            }
        }
        if subsets.len() == before {
            return Err(EmbedError::DegenerateSample);
        }
    }
    Ok(subsets)
}
