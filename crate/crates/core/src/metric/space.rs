use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Axiom, MetricError, Result, DEFAULT_CARDINALITY_CAP};
use crate::rng;

/// Triples are checked exhaustively up to this many points.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 64;
/// Number of sampled triples checked for larger spaces.
pub const SAMPLED_TRIANGLES: usize = 100_000;
/// Absolute tolerance on diameter-normalized distances for the triangle check.
pub const TRIANGLE_TOLERANCE: f64 = 1e-12;

const SAMPLING_SEED: u64 = 0x7472_6961_6e67_6c65;

/// Euclidean distance. Every routine that compares images against
/// coordinate-derived distances goes through this function so that an
/// isometry measures as exactly 1.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A validated finite metric space.
///
/// Distances are stored row-major in a dense `k x k` matrix. Points may carry
/// Euclidean coordinates, in which case the distance matrix is the Euclidean
/// one computed by [`euclidean`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    coords: Option<Vec<Vec<f64>>>,
    dist: Vec<f64>,
    k: usize,
    diameter: f64,
}

impl FiniteMetricSpace {
    /// Validates `dist` (and optional coordinates) into a metric space.
    pub fn new(dist: Vec<Vec<f64>>, coords: Option<Vec<Vec<f64>>>) -> Result<Self> {
        Self::with_cap(dist, coords, DEFAULT_CARDINALITY_CAP)
    }

    pub fn with_cap(
        dist: Vec<Vec<f64>>,
        coords: Option<Vec<Vec<f64>>>,
        cap: usize,
    ) -> Result<Self> {
        let k = dist.len();
        if k == 0 {
            return Err(MetricError::InvalidInput("empty distance matrix".into()));
        }
        if k > cap {
            return Err(MetricError::CardinalityOverflow { count: k as f64, cap });
        }
        if let Some(row) = dist.iter().position(|r| r.len() != k) {
            return Err(MetricError::InvalidInput(format!(
                "distance matrix is not square: row {row} has {} entries, expected {k}",
                dist[row].len()
            )));
        }
        if let Some(c) = &coords {
            check_coords(c)?;
            if c.len() != k {
                return Err(MetricError::InvalidInput(format!(
                    "{} coordinate rows for {k} points",
                    c.len()
                )));
            }
        }
        let flat: Vec<f64> = dist.into_iter().flatten().collect();
        if flat.iter().any(|d| !d.is_finite()) {
            return Err(MetricError::InvalidInput("non-finite distance".into()));
        }
        let space = Self::assemble(flat, k, coords);
        space.validate()?;
        Ok(space)
    }

    /// Space of Euclidean points with the induced distance.
    pub fn from_coords(coords: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_coords_with_cap(coords, DEFAULT_CARDINALITY_CAP)
    }

    pub fn from_coords_with_cap(coords: Vec<Vec<f64>>, cap: usize) -> Result<Self> {
        let k = coords.len();
        if k == 0 {
            return Err(MetricError::InvalidInput("no points".into()));
        }
        if k > cap {
            return Err(MetricError::CardinalityOverflow { count: k as f64, cap });
        }
        check_coords(&coords)?;
        let mut flat = vec![0.0; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let d = euclidean(&coords[i], &coords[j]);
                flat[i * k + j] = d;
                flat[j * k + i] = d;
            }
        }
        let space = Self::assemble(flat, k, Some(coords));
        space.validate()?;
        Ok(space)
    }

    /// Builds from a matrix already known to be a metric (used by product
    /// constructions). Only the cached diameter is computed.
    pub(crate) fn assemble(dist: Vec<f64>, k: usize, coords: Option<Vec<Vec<f64>>>) -> Self {
        let diameter = dist.iter().copied().fold(0.0, f64::max);
        Self { coords, dist, k, diameter }
    }

    fn validate(&self) -> Result<()> {
        let k = self.k;
        for i in 0..k {
            if self.d(i, i) != 0.0 {
                return Err(MetricError::MetricViolation { axiom: Axiom::Identity, witness: (i, i, i) });
            }
            for j in (i + 1)..k {
                if self.d(i, j) != self.d(j, i) {
                    return Err(MetricError::MetricViolation { axiom: Axiom::Symmetry, witness: (i, j, i) });
                }
                if self.d(i, j) <= 0.0 {
                    return Err(MetricError::MetricViolation { axiom: Axiom::Positivity, witness: (i, j, j) });
                }
            }
        }
        if k <= EXHAUSTIVE_TRIANGLE_LIMIT {
            self.check_all_triangles()
        } else {
            self.check_sampled_triangles(SAMPLED_TRIANGLES)
        }
    }

    fn triangle_ok(&self, i: usize, j: usize, l: usize) -> bool {
        // d(i,l) <= d(i,j) + d(j,l), normalized by the diameter
        let scale = if self.diameter > 0.0 { self.diameter } else { 1.0 };
        (self.d(i, l) - self.d(i, j) - self.d(j, l)) / scale <= TRIANGLE_TOLERANCE
    }

    /// Checks all `k^3` triples.
    pub fn check_all_triangles(&self) -> Result<()> {
        let k = self.k;
        for i in 0..k {
            for l in 0..k {
                for j in 0..k {
                    if !self.triangle_ok(i, j, l) {
                        return Err(MetricError::MetricViolation {
                            axiom: Axiom::Triangle,
                            witness: (i, j, l),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks `samples` seeded random triples.
    pub fn check_sampled_triangles(&self, samples: usize) -> Result<()> {
        let mut rng = rng::seeded(SAMPLING_SEED);
        for _ in 0..samples {
            let (i, j, l) = (
                rng.random_range(0..self.k),
                rng.random_range(0..self.k),
                rng.random_range(0..self.k),
            );
            if !self.triangle_ok(i, j, l) {
                return Err(MetricError::MetricViolation { axiom: Axiom::Triangle, witness: (i, j, l) });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.k + j]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Ambient dimension when the space carries coordinates.
    pub fn ambient_dim(&self) -> Option<usize> {
        self.coords.as_ref().map(|c| c[0].len())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.k..(i + 1) * self.k]
    }

    /// Distance matrix as nested rows.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.k).map(<[f64]>::to_vec).collect()
    }

    /// Minimum separation of a subset of point indices.
    ///
    /// The minimum pairwise distance when the subset has two or more points,
    /// `1` for a singleton and `+inf` for the empty set.
    pub fn separation(&self, subset: &[usize]) -> Result<f64> {
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.k) {
            return Err(MetricError::InvalidInput(format!("index {bad} out of range for k = {}", self.k)));
        }
        Ok(match subset.len() {
            0 => f64::INFINITY,
            1 => 1.0,
            _ => {
                let mut sep = f64::INFINITY;
                for (a, &i) in subset.iter().enumerate() {
                    for &j in &subset[a + 1..] {
                        if i != j {
                            sep = sep.min(self.d(i, j));
                        }
                    }
                }
                sep
            }
        })
    }

    /// Minimum distance between distinct points of the whole space.
    pub fn min_distance(&self) -> f64 {
        let all: Vec<usize> = (0..self.k).collect();
        if self.k < 2 {
            return f64::INFINITY;
        }
        self.separation(&all).unwrap_or(f64::INFINITY)
    }

    pub fn to_document(&self) -> SpaceDocument {
        SpaceDocument { points: self.coords.clone(), dist: Some(self.matrix()) }
    }

    pub fn from_document(doc: SpaceDocument) -> Result<Self> {
        match (doc.dist, doc.points) {
            (Some(dist), points) => Self::new(dist, points),
            (None, Some(points)) => Self::from_coords(points),
            (None, None) => Err(MetricError::InvalidInput("document has neither \"dist\" nor \"points\"".into())),
        }
    }
}

fn check_coords(coords: &[Vec<f64>]) -> Result<()> {
    let dim = coords.first().map(Vec::len).unwrap_or(0);
    if dim == 0 {
        return Err(MetricError::InvalidInput("zero-dimensional coordinates".into()));
    }
    if coords.iter().any(|c| c.len() != dim) {
        return Err(MetricError::InvalidInput("coordinate rows have mixed dimension".into()));
    }
    if coords.iter().flatten().any(|x| !x.is_finite()) {
        return Err(MetricError::InvalidInput("non-finite coordinate".into()));
    }
    Ok(())
}

/// JSON form of a space: `{"points": [[...]...], "dist": [[...]...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpaceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
}

/// Product space with the sum metric `d((x1,y1),(x2,y2)) = dX(x1,x2) + dY(y1,y2)`.
///
/// Point `(i, j)` has index `i * k_Y + j`.
pub fn product_space(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    product_space_with_cap(x, y, DEFAULT_CARDINALITY_CAP)
}

pub fn product_space_with_cap(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    cap: usize,
) -> Result<FiniteMetricSpace> {
    let (kx, ky) = (x.k(), y.k());
    let k = kx.checked_mul(ky).filter(|&k| k <= cap).ok_or(MetricError::CardinalityOverflow {
        count: kx as f64 * ky as f64,
        cap,
    })?;
    let mut dist = vec![0.0; k * k];
    for i1 in 0..kx {
        for j1 in 0..ky {
            let a = i1 * ky + j1;
            for i2 in 0..kx {
                for j2 in 0..ky {
                    dist[a * k + i2 * ky + j2] = x.d(i1, i2) + y.d(j1, j2);
                }
            }
        }
    }
    Ok(FiniteMetricSpace::assemble(dist, k, None))
}
