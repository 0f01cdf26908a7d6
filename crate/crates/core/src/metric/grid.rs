use serde::{Deserialize, Serialize};

use super::{FiniteMetricSpace, MetricError, Result, DEFAULT_CARDINALITY_CAP};

/// The machine grid of points `(a_1/2^{j_1}, ..., a_d/2^{j_d})` with
/// `a_i in {-M..M}` and `j_i in {0..p}`.
///
/// Distinct real tuples are stored once; `a/2^j` representations that
/// coincide (e.g. `1/1` and `2/2`) are collapsed.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicGrid {
    d: usize,
    p: u32,
    mantissa: u64,
    axis: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl DyadicGrid {
    pub fn new(d: usize, p: u32, mantissa: u64) -> Result<Self> {
        Self::with_cap(d, p, mantissa, DEFAULT_CARDINALITY_CAP)
    }

    pub fn with_cap(d: usize, p: u32, mantissa: u64, cap: usize) -> Result<Self> {
        if d == 0 {
            return Err(MetricError::InvalidInput("grid dimension must be >= 1".into()));
        }
        if mantissa == 0 {
            return Err(MetricError::InvalidInput("mantissa bound must be >= 1".into()));
        }
        if p > 60 || mantissa > (1 << 40) {
            return Err(MetricError::InvalidInput("grid parameters out of supported range".into()));
        }
        let axis = axis_values(p, mantissa);
        let count = (axis.len() as f64).powi(d as i32);
        if count > cap as f64 {
            return Err(MetricError::CardinalityOverflow { count, cap });
        }
        let mut points: Vec<Vec<f64>> = vec![Vec::with_capacity(d)];
        for _ in 0..d {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push(v);
                        next
                    })
                })
                .collect();
        }
        Ok(Self { d, p, mantissa, axis, points })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn mantissa(&self) -> u64 {
        self.mantissa
    }

    /// Sorted distinct coordinate values of one axis.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Natural log of the representation count `(2^{p+1} M)^d`, the
    /// convention used when counting grid points in the ReLU corollary.
    pub fn ln_representation_count(&self) -> f64 {
        self.d as f64 * ((self.p + 1) as f64 * std::f64::consts::LN_2 + (self.mantissa as f64).ln())
    }

    /// `2 M sqrt(d)`.
    pub fn diameter(&self) -> f64 {
        2.0 * self.mantissa as f64 * (self.d as f64).sqrt()
    }

    /// Minimum distance between distinct grid points, `2^{-p}`.
    pub fn separation(&self) -> f64 {
        self.axis.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Largest gap between consecutive axis values. Every real in `[-M, M]`
    /// lies within half of this of the grid.
    pub fn max_gap(&self) -> f64 {
        self.axis.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Nearest grid point by Euclidean distance.
    ///
    /// The grid is a Cartesian product, so the nearest point is found
    /// coordinate-wise. Exact ties go to the smaller axis value.
    pub fn round(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.d, "rounding a {}-vector onto a {}-dimensional grid", y.len(), self.d);
        y.iter().map(|&v| self.axis[self.round_axis_index(v)]).collect()
    }

    /// Index into [`Self::axis`] of the nearest value to `v`.
    pub fn round_axis_index(&self, v: f64) -> usize {
        let axis = &self.axis;
        let upper = axis.partition_point(|&a| a < v);
        if upper == 0 {
            return 0;
        }
        if upper == axis.len() {
            return axis.len() - 1;
        }
        let lower = upper - 1;
        if v - axis[lower] <= axis[upper] - v {
            lower
        } else {
            upper
        }
    }

    /// Index of a point in [`Self::points`].
    pub fn index_of(&self, point: &[f64]) -> Option<usize> {
        let mut idx = 0usize;
        for &v in point {
            let pos = self.axis.binary_search_by(|a| a.total_cmp(&v)).ok()?;
            idx = idx * self.axis.len() + pos;
        }
        Some(idx)
    }

    /// Nearest grid point, returned as an index into [`Self::points`].
    pub fn round_index(&self, y: &[f64]) -> usize {
        y.iter().fold(0usize, |acc, &v| acc * self.axis.len() + self.round_axis_index(v))
    }

    /// The grid as a Euclidean finite metric space.
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::from_coords(self.points.clone())
    }

    pub fn to_document(&self) -> GridDocument {
        GridDocument { d: self.d, p: self.p, m: self.mantissa, points: self.points.clone() }
    }
}

fn axis_values(p: u32, mantissa: u64) -> Vec<f64> {
    let m = mantissa as i64;
    let mut values: Vec<f64> = (0..=p)
        .flat_map(|j| (-m..=m).map(move |a| a as f64 / (1u64 << j) as f64))
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Round onto an arbitrary grid by scanning every point. Reference
/// implementation for tests; ties go to the first point in lexicographic
/// order, which matches the per-coordinate round-down policy.
pub fn round_by_scan(grid: &DyadicGrid, y: &[f64]) -> Vec<f64> {
    let mut best = &grid.points[0];
    let mut best_d = f64::INFINITY;
    for g in &grid.points {
        let d: f64 = g.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best_d = d;
            best = g;
        }
    }
    best.clone()
}

/// JSON form: the space schema plus `{"d", "p", "M"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridDocument {
    pub d: usize,
    pub p: u32,
    #[serde(rename = "M")]
    pub m: u64,
    pub points: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_grid() {
        let g = DyadicGrid::new(1, 0, 1).unwrap();
        assert_eq!(g.axis(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn halves_collapse_duplicates() {
        let g = DyadicGrid::new(1, 1, 2).unwrap();
        // a/2^j for a in -2..=2, j in 0..=1, deduplicated
        assert_eq!(g.axis(), &[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]);
        assert_eq!(g.to_space().unwrap().diameter(), 4.0);
        assert_eq!(g.diameter(), 4.0);
    }

    #[test]
    fn square_grid() {
        let g = DyadicGrid::new(2, 0, 1).unwrap();
        assert_eq!(g.len(), 9);
        let s = g.to_space().unwrap();
        assert!((s.diameter() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rounding_examples() {
        let g = DyadicGrid::new(1, 0, 1).unwrap();
        assert_eq!(g.round(&[0.3]), vec![0.0]);
        assert_eq!(g.round(&[0.5]), vec![0.0]);
        assert_eq!(g.round(&[-0.5]), vec![-1.0]);
        assert_eq!(g.round(&[7.0]), vec![1.0]);
        let g = DyadicGrid::new(1, 1, 2).unwrap();
        assert_eq!(g.round(&[1.7]), vec![2.0]);
        assert_eq!(g.round(&[1.5]), vec![1.0]);
    }

    #[test]
    fn round_matches_scan_and_index() {
        let g = DyadicGrid::new(2, 2, 3).unwrap();
        for a in -40..=40 {
            for b in [-3.3, -0.61, 0.125, 0.4, 2.6] {
                let y = [a as f64 * 0.0937, b];
                let r = g.round(&y);
                assert_eq!(r, round_by_scan(&g, &y), "at {y:?}");
                assert_eq!(g.points()[g.round_index(&y)], r);
                assert_eq!(g.index_of(&r), Some(g.round_index(&y)));
            }
        }
    }

    #[test]
    fn separation_and_counts() {
        let g = DyadicGrid::new(2, 3, 4).unwrap();
        assert_eq!(g.separation(), 0.125);
        assert_eq!(g.max_gap(), 1.0);
        let expected = 2.0 * (16.0f64 * 4.0).ln();
        assert!((g.ln_representation_count() - expected).abs() < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(DyadicGrid::with_cap(3, 2, 4, 1000), Err(MetricError::CardinalityOverflow { .. })));
        assert!(DyadicGrid::new(0, 1, 1).is_err());
        assert!(DyadicGrid::new(1, 1, 0).is_err());
    }
}
