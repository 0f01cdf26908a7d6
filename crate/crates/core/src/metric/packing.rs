use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{euclidean, FiniteMetricSpace, MetricError, Result};

/// Default number of consecutive rejected candidates that certifies maximality.
pub const DEFAULT_AUDIT_BUDGET: usize = 100_000;

/// Lattice seeding is skipped when the lattice would exceed this many points.
const MAX_LATTICE_POINTS: usize = 1 << 16;

/// A `delta`-separated subset of the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSet {
    pub points: Vec<Vec<f64>>,
    pub delta: f64,
    /// Set once `budget` consecutive uniform candidates were all within
    /// `delta` of the set.
    pub maximal: bool,
}

impl PackingSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Minimum pairwise distance (exhaustive).
    pub fn min_pairwise(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min(euclidean(a, b));
            }
        }
        best
    }

    /// Natural log of the packing-number upper bound `3^d (sqrt(d)/delta)^d`.
    pub fn ln_upper_bound(d: usize, delta: f64) -> f64 {
        let d = d as f64;
        d * (3f64.ln() + (d.sqrt() / delta).ln())
    }

    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::from_coords(self.points.clone())
    }
}

/// Greedy `delta`-packing of `[0,1]^d`.
///
/// Points of the lattice `delta * Z^d` inside the cube are taken first (when
/// that lattice is small), then uniform candidates are added whenever they
/// keep the separation. The run stops once `budget` consecutive candidates are
/// rejected, which certifies maximality statistically. If that does not happen
/// within `64 * budget` candidates the audit is abandoned.
pub fn greedy_packing<R: Rng + ?Sized>(d: usize, delta: f64, rng: &mut R, budget: usize) -> Result<PackingSet> {
    if d == 0 {
        return Err(MetricError::InvalidInput("packing dimension must be >= 1".into()));
    }
    // radii above sqrt(d) are accepted: the packing is then a single point
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(MetricError::InvalidInput(format!("packing radius {delta} must be positive")));
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    let admissible = |points: &[Vec<f64>], c: &[f64]| points.iter().all(|p| euclidean(p, c) >= delta);

    let per_axis = (1.0 / delta).floor() as usize + 1;
    if (per_axis as f64).powi(d as i32) <= MAX_LATTICE_POINTS as f64 {
        let axis: Vec<f64> = (0..per_axis).map(|i| i as f64 * delta).collect();
        let mut lattice: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..d {
            lattice = lattice
                .into_iter()
                .flat_map(|pre| {
                    axis.iter().map(move |&v| {
                        let mut next = pre.clone();
                        next.push(v);
                        next
                    })
                })
                .collect();
        }
        for c in lattice {
            if admissible(&points, &c) {
                points.push(c);
            }
        }
    }

    let max_candidates = budget.saturating_mul(64).max(budget + 1);
    let mut rejected_run = 0usize;
    let mut drawn = 0usize;
    while rejected_run < budget {
        if drawn >= max_candidates {
            return Err(MetricError::BudgetExhausted { candidates: drawn, budget });
        }
        drawn += 1;
        let c: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        if admissible(&points, &c) {
            points.push(c);
            rejected_run = 0;
        } else {
            rejected_run += 1;
        }
    }
    Ok(PackingSet { points, delta, maximal: true })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PackingDocument {
    pub points: Vec<Vec<f64>>,
    pub delta: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn unit_interval_half() {
        let p = greedy_packing(1, 0.5, &mut rng::seeded(1), 2_000).unwrap();
        assert!(p.len() <= 3);
        assert!(p.min_pairwise() >= 0.5);
        assert!(p.maximal);
    }

    #[test]
    fn radius_above_diameter_gives_one_point() {
        let p = greedy_packing(2, 1.5, &mut rng::seeded(2), 2_000).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn square_half_within_bounds() {
        let p = greedy_packing(2, 0.5, &mut rng::seeded(3), 5_000).unwrap();
        assert!(p.len() >= 4 && p.len() <= 72, "{} points", p.len());
        assert!(p.min_pairwise() >= 0.5);
        // the four corners of the square are pairwise >= 1 apart, so a
        // 0.5-packing of size 4 exists
        let corners = PackingSet {
            points: vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            delta: 0.5,
            maximal: false,
        };
        assert!(corners.min_pairwise() >= 0.5);
    }

    #[test]
    fn bad_radius() {
        assert!(greedy_packing(2, 0.0, &mut rng::seeded(0), 10).is_err());
        assert!(greedy_packing(2, 1.5, &mut rng::seeded(0), 10).is_ok());
        assert!(greedy_packing(2, f64::NAN, &mut rng::seeded(0), 10).is_err());
        assert_eq!(greedy_packing(1, 1.5, &mut rng::seeded(0), 10).unwrap().len(), 1);
    }

    #[test]
    fn exhausted_budget() {
        // tiny radius: the packing keeps growing, so no run of rejections
        let r = greedy_packing(3, 0.01, &mut rng::seeded(0), 50);
        assert!(matches!(r, Err(MetricError::BudgetExhausted { .. })));
    }
}
