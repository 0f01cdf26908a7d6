use nalgebra::{DMatrix, SymmetricEigen};

use super::{EmbedError, Embedding, EmbeddingRecipe, Result};
use crate::metric::FiniteMetricSpace;

/// The space's own coordinates, zero-padded to `R^m`.
pub fn identity_embed(space: &FiniteMetricSpace, m: usize) -> Result<Embedding> {
    let coords = space.coords().ok_or(EmbedError::NoCoordinates)?;
    let d = space.ambient_dim().unwrap_or(0);
    if m < d {
        return Err(EmbedError::DimensionTooSmall { m, min: d - 1 });
    }
    let images = coords
        .iter()
        .map(|c| {
            let mut row = c.clone();
            row.resize(m, 0.0);
            row
        })
        .collect();
    Embedding::measured(space, images, EmbeddingRecipe::Identity { m })
}

/// One-dimensional embedding from the leading classical-scaling coordinate.
///
/// Points are placed at `sqrt(lambda_1) v_1`, the top eigenpair of the
/// double-centred squared-distance matrix. Walking the points in that order,
/// any gap shorter than `c * d(x_i, x_{i+1})` is widened to exactly that,
/// where `c` is the smallest ratio among pairs the scaling kept apart.
pub fn line_embed_heuristic(space: &FiniteMetricSpace) -> Result<Embedding> {
    let k = space.k();
    if k < 2 {
        return Err(EmbedError::TooFewPoints(k));
    }
    let x = leading_coordinate(space);

    let mut c = f64::INFINITY;
    for i in 0..k {
        for j in i + 1..k {
            let gap = (x[i] - x[j]).abs();
            if gap > 0.0 {
                c = c.min(gap / space.d(i, j));
            }
        }
    }
    if !c.is_finite() {
        c = 1.0;
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut placed = vec![0.0; k];
    placed[order[0]] = x[order[0]];
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let natural = placed[a] + (x[b] - x[a]);
        let floor = placed[a] + c * space.d(a, b);
        placed[b] = natural.max(floor);
    }
    let images = placed.into_iter().map(|v| vec![v]).collect();
    Embedding::measured(space, images, EmbeddingRecipe::LineHeuristic)
}

fn leading_coordinate(space: &FiniteMetricSpace) -> Vec<f64> {
    let k = space.k();
    let sq = DMatrix::from_fn(k, k, |i, j| space.d(i, j).powi(2));
    let row_means: Vec<f64> = (0..k).map(|i| sq.row(i).sum() / k as f64).collect();
    let total_mean = row_means.iter().sum::<f64>() / k as f64;
    let b = DMatrix::from_fn(k, k, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + total_mean));
    let eig = SymmetricEigen::new(b);
    let top = eig.eigenvalues.iter().enumerate().fold(0, |best, (i, &v)| {
        if v > eig.eigenvalues[best] {
            i
        } else {
            best
        }
    });
    let lambda = eig.eigenvalues[top].max(0.0);
    let v = eig.eigenvectors.column(top);
    // fix the sign so the first nonzero entry is positive
    let sign = v.iter().find(|x| x.abs() > 1e-12).map_or(1.0, |x| x.signum());
    v.iter().map(|x| sign * lambda.sqrt() * x).collect()
}

/// `outer` applied to every image of `inner`, re-measured against `space`.
pub fn compose<F>(space: &FiniteMetricSpace, inner: &Embedding, outer: F, label: &str) -> Result<Embedding>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let images = inner.images.iter().map(|y| outer(y)).collect();
    let recipe = EmbeddingRecipe::Compose { outer: label.to_string(), inner: Box::new(inner.recipe.clone()) };
    Embedding::measured(space, images, recipe)
}
