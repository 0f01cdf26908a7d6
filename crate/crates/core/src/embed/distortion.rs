use rayon::prelude::*;

use super::{EmbedError, Result};
use crate::metric::{euclidean, FiniteMetricSpace};

/// Rows are scanned in parallel above this many points.
const PARALLEL_ROWS: usize = 256;

/// Exact bi-Lipschitz constants of an embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distortion {
    pub lip_lower: f64,
    pub lip_upper: f64,
    pub tau: f64,
}

/// Minimum and maximum of `|phi(x) - phi(y)| / d(x, y)` over all pairs.
pub fn measure_distortion(images: &[Vec<f64>], space: &FiniteMetricSpace) -> Result<Distortion> {
    let k = space.k();
    if images.len() != k {
        return Err(EmbedError::ShapeMismatch(format!("{} images for {k} points", images.len())));
    }
    if k < 2 {
        return Err(EmbedError::TooFewPoints(k));
    }
    let row = |i: usize| -> std::result::Result<(f64, f64), (usize, usize)> {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for j in i + 1..k {
            let e = euclidean(&images[i], &images[j]);
            if e == 0.0 {
                return Err((i, j));
            }
            let r = e / space.d(i, j);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Ok((lo, hi))
    };
    let fold = |a: (f64, f64), b: (f64, f64)| (a.0.min(b.0), a.1.max(b.1));
    // rows are reduced in index order so the reported collision is the
    // lexicographically first one either way
    let rows: Vec<_> = if k >= PARALLEL_ROWS {
        (0..k - 1).into_par_iter().map(row).collect()
    } else {
        (0..k - 1).map(row).collect()
    };
    let (lo, hi) = rows
        .into_iter()
        .try_fold((f64::INFINITY, 0.0), |a, r| r.map(|b| fold(a, b)))
    .map_err(EmbedError::NotInjective)?;
    Ok(Distortion { lip_lower: lo, lip_upper: hi, tau: hi / lo })
}
