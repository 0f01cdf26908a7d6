use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Result, TransportError};
use crate::metric::FiniteMetricSpace;
use crate::rng;

/// Allowed deviation of a measure's total mass from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Probability weights over the points `0..k` of a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(TransportError::InvalidMeasure("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(TransportError::InvalidMeasure(format!("weight {w} is not a non-negative real")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(TransportError::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    /// Rescales non-negative masses to total 1.
    pub fn normalized(masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(TransportError::InvalidMeasure(format!("total mass {total} cannot be normalized")));
        }
        Self::new(masses.into_iter().map(|w| w / total).collect())
    }

    pub fn dirac(k: usize, at: usize) -> Self {
        assert!(at < k, "Dirac location {at} outside 0..{k}");
        let mut weights = vec![0.0; k];
        weights[at] = 1.0;
        Self { weights }
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0);
        Self { weights: vec![1.0 / k as f64; k] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, _)| i)
    }

    pub(crate) fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        if self.k() != space.k() {
            return Err(TransportError::MarginalMismatch { left: self.k(), right: space.k() });
        }
        Ok(())
    }

    pub fn to_document(&self) -> MeasureDocument {
        MeasureDocument { weights: self.weights.clone() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeasureDocument {
    pub weights: Vec<f64>,
}

impl TryFrom<MeasureDocument> for DiscreteMeasure {
    type Error = TransportError;

    fn try_from(doc: MeasureDocument) -> Result<Self> {
        Self::new(doc.weights)
    }
}

/// `max_B |mu(B) - nu(B)|`, computed as half the L1 distance of the weights.
pub fn tv_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.k() != nu.k() {
        return Err(TransportError::MarginalMismatch { left: mu.k(), right: nu.k() });
    }
    Ok(0.5 * mu.weights.iter().zip(&nu.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Joint distribution over `space x space`, stored densely row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    k: usize,
    mass: Vec<f64>,
}

impl Coupling {
    pub(crate) fn from_flat(k: usize, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), k * k);
        Self { k, mass }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.k + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.mass.chunks(self.k).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for row in self.mass.chunks(self.k) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    /// `sum_ij d(i,j) gamma(i,j)`.
    pub fn cost(&self, space: &FiniteMetricSpace) -> f64 {
        let mut total = 0.0;
        for i in 0..self.k {
            for j in 0..self.k {
                let g = self.get(i, j);
                if g != 0.0 {
                    total += g * space.d(i, j);
                }
            }
        }
        total
    }

    /// Largest absolute marginal error against `(mu, nu)`.
    pub fn marginal_error(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let rows = self.row_sums().into_iter().zip(mu.weights()).map(|(a, b)| (a - b).abs());
        let cols = self.col_sums().into_iter().zip(nu.weights()).map(|(a, b)| (a - b).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Dense CSV, one row per source point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.mass.chunks(self.k) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// `N` i.i.d. draws of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub indices: Vec<usize>,
    pub seed: u64,
    pub n: usize,
}

/// Draws `n` points from `mu` with the generator for `seed`.
pub fn sample(mu: &DiscreteMeasure, n: usize, seed: u64) -> Result<SampleBatch> {
    let mut rng = rng::seeded(seed);
    let mut batch = sample_with(mu, n, &mut rng)?;
    batch.seed = seed;
    Ok(batch)
}

/// Draws `n` points from `mu` using a caller-provided generator. The batch's
/// `seed` field is left at 0.
pub fn sample_with<R: Rng + ?Sized>(mu: &DiscreteMeasure, n: usize, rng: &mut R) -> Result<SampleBatch> {
    if n == 0 {
        return Err(TransportError::InvalidMeasure("sample size must be >= 1".into()));
    }
    let dist = WeightedIndex::new(&mu.weights).map_err(|e| TransportError::InvalidMeasure(e.to_string()))?;
    let indices = (0..n).map(|_| dist.sample(rng)).collect();
    Ok(SampleBatch { indices, seed: 0, n })
}

/// Counts divided by `N`.
pub fn empirical(batch: &SampleBatch, k: usize) -> Result<DiscreteMeasure> {
    if batch.indices.is_empty() {
        return Err(TransportError::InvalidMeasure("empty batch".into()));
    }
    let mut counts = vec![0usize; k];
    for &i in &batch.indices {
        if i >= k {
            return Err(TransportError::DomainMismatch(format!("sample index {i} outside 0..{k}")));
        }
        counts[i] += 1;
    }
    let n = batch.indices.len() as f64;
    // direct division keeps each weight an exact multiple of 1/N where possible
    let weights: Vec<f64> = counts.into_iter().map(|c| c as f64 / n).collect();
    DiscreteMeasure::new(weights)
}

/// Pushforward of `mu_x` under `x -> (x, f(x))`, as a measure on the
/// product space indexed `x * k_y + y`.
pub fn graph_pushforward(mu_x: &DiscreteMeasure, f: &[usize], k_y: usize) -> Result<DiscreteMeasure> {
    if f.len() != mu_x.k() {
        return Err(TransportError::DomainMismatch(format!(
            "map defined on {} points, measure on {}",
            f.len(),
            mu_x.k()
        )));
    }
    if let Some(&bad) = f.iter().find(|&&y| y >= k_y) {
        return Err(TransportError::DomainMismatch(format!("image {bad} outside 0..{k_y}")));
    }
    let mut weights = vec![0.0; mu_x.k() * k_y];
    for (x, (&y, &w)) in f.iter().zip(mu_x.weights()).enumerate() {
        weights[x * k_y + y] = w;
    }
    Ok(DiscreteMeasure { weights })
}
