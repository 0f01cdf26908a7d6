use rayon::prelude::*;

use super::{Hypothesis, LearningError, Result};
use crate::metric::{euclidean, DyadicGrid};

/// `f` restricted to an input grid with outputs rounded onto a 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction {
    /// Indices into the output grid's points.
    pub hypothesis: Hypothesis,
    /// The rounded values themselves.
    pub values: Vec<f64>,
}

/// Rounds `f` on every point of `grid_in` to the nearest value of the
/// one-dimensional `grid_out`. Values outside `[-M, M]` of the output grid
/// are rejected rather than clamped.
pub fn discretize_function<F>(f: F, grid_in: &DyadicGrid, grid_out: &DyadicGrid) -> Result<DiscreteFunction>
where
    F: Fn(&[f64]) -> f64,
{
    if grid_out.d() != 1 {
        return Err(LearningError::ShapeMismatch(format!("output grid has dimension {}", grid_out.d())));
    }
    let bound = grid_out.mantissa() as f64;
    let mut table = Vec::with_capacity(grid_in.len());
    let mut values = Vec::with_capacity(grid_in.len());
    for x in grid_in.points() {
        let v = f(x);
        if !(v.abs() <= bound) {
            return Err(LearningError::RangeEscape { value: v, bound });
        }
        let idx = grid_out.round_axis_index(v);
        table.push(idx);
        values.push(grid_out.axis()[idx]);
    }
    let lip_upper = lipschitz_on_grid(grid_in.points(), &values);
    Ok(DiscreteFunction { hypothesis: Hypothesis { table, lip_upper }, values })
}

/// Extra Lipschitz slack from rounding: the output grid's largest gap over
/// the input grid's separation.
pub fn discretization_slack(grid_in: &DyadicGrid, grid_out: &DyadicGrid) -> f64 {
    grid_out.max_gap() / grid_in.separation()
}

/// `max |v_i - v_j| / |x_i - x_j|` over all pairs of points.
pub fn lipschitz_on_grid(points: &[Vec<f64>], values: &[f64]) -> f64 {
    assert_eq!(points.len(), values.len());
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in i + 1..points.len() {
                best = best.max((values[i] - values[j]).abs() / euclidean(&points[i], &points[j]));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_matching_grids() {
        let g = DyadicGrid::new(1, 1, 2).unwrap();
        let d = discretize_function(|x| x[0], &g, &g).unwrap();
        assert_eq!(d.values, g.axis());
        assert_eq!(d.hypothesis.lip_upper, 1.0);
    }

    #[test]
    fn integer_grids() {
        let g = DyadicGrid::new(1, 0, 3).unwrap();
        let d = discretize_function(|x| 0.9 * x[0] + 0.2, &g, &g).unwrap();
        assert!(d.hypothesis.lip_upper <= 2.0);
        assert_eq!(discretization_slack(&g, &g), 1.0);
    }

    #[test]
    fn wavy_map() {
        let gi = DyadicGrid::new(1, 2, 4).unwrap();
        let go = DyadicGrid::new(1, 2, 4).unwrap();
        let d = discretize_function(|x| 3.0 * (x[0] / 3.0).sin(), &gi, &go).unwrap();
        assert!(d.hypothesis.lip_upper <= 1.0 + discretization_slack(&gi, &go));
    }

    #[test]
    fn coarse_outer_cells_exceed_l_plus_one() {
        // inputs 1/4 apart, outputs straddling the midpoint of the unit cell [3, 4]
        let gi = DyadicGrid::new(1, 2, 4).unwrap();
        let f = |x: &[f64]| 3.5 + 0.08 * (x[0] - 0.125);
        let d = discretize_function(f, &gi, &gi).unwrap();
        assert!(d.hypothesis.lip_upper > 0.08 + 1.0);
        assert!(d.hypothesis.lip_upper <= 0.08 + discretization_slack(&gi, &gi));
    }

    #[test]
    fn range_escape() {
        let g = DyadicGrid::new(1, 0, 1).unwrap();
        let r = discretize_function(|x| 5.0 * x[0], &g, &g);
        assert!(matches!(r, Err(LearningError::RangeEscape { .. })));
    }
}
