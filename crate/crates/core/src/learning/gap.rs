use serde::{Deserialize, Serialize};

use super::{enumerate_class, Hypothesis, LearningError, LossFn, Result};
use crate::metric::FiniteMetricSpace;
use crate::transport::{empirical, DiscreteMeasure, SampleBatch};

/// `sum_{x,y} P(x, y) L(f(x), y)` for `P` on `X x Y` indexed `x * k_y + y`.
pub fn risk(h: &Hypothesis, joint: &DiscreteMeasure, loss: &LossFn, k_y: usize) -> f64 {
    joint
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(idx, w)| w * loss.value(h.apply(idx / k_y), idx % k_y))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub sup_gap: f64,
    /// A maximizing hypothesis table (first in enumeration order).
    pub argmax: Vec<usize>,
    pub class_size: usize,
}

/// `sup_f |R_P(f) - R_Q(f)|` over every `f: X -> Y` with `L_u(f) <= lip`.
pub fn sup_gap(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    lip: f64,
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    loss: &LossFn,
) -> Result<GapReport> {
    let k = x.k() * y.k();
    if p.k() != k || q.k() != k {
        return Err(LearningError::ShapeMismatch(format!(
            "measures on {} and {} points, product has {k}",
            p.k(),
            q.k()
        )));
    }
    let class = enumerate_class(x, y, lip)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for h in &class {
        let g = (risk(h, p, loss, y.k()) - risk(h, q, loss, y.k())).abs();
        if g > best.0 {
            best = (g, h.table.clone());
        }
    }
    Ok(GapReport { sup_gap: best.0, argmax: best.1, class_size: class.len() })
}

/// [`sup_gap`] between `P` and the empirical measure of `batch`.
pub fn sup_gap_bruteforce(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    lip: f64,
    p: &DiscreteMeasure,
    batch: &SampleBatch,
    loss: &LossFn,
) -> Result<GapReport> {
    let q = empirical(batch, x.k() * y.k())?;
    sup_gap(x, y, lip, p, &q, loss)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_coords(xs.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn identical_measures_have_no_gap() {
        let (x, y) = (line(&[0.0, 1.0, 2.0]), line(&[0.0, 1.0]));
        let p = DiscreteMeasure::normalized(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let r = sup_gap(&x, &y, 5.0, &p, &p, &LossFn::absolute(&y)).unwrap();
        assert_eq!(r.sup_gap, 0.0);
        assert_eq!(r.class_size, 8);
    }

    #[test]
    fn constants_only() {
        let (x, y) = (line(&[0.0, 1.0]), line(&[0.0, 1.0, 3.0]));
        let loss = LossFn::absolute(&y);
        let p = DiscreteMeasure::normalized(vec![1.0, 0.0, 2.0, 1.0, 1.0, 1.0]).unwrap();
        let q = DiscreteMeasure::normalized(vec![0.0, 3.0, 0.0, 2.0, 0.0, 1.0]).unwrap();
        let got = sup_gap(&x, &y, 0.0, &p, &q, &loss).unwrap().sup_gap;
        // closed form: only constant maps, so the gap is a max over k_Y label expectations
        let label_risk = |m: &DiscreteMeasure, c: usize| -> f64 {
            m.weights().iter().enumerate().map(|(i, w)| w * y.d(c, i % 3)).sum()
        };
        let expected = (0..3).map(|c| (label_risk(&p, c) - label_risk(&q, c)).abs()).fold(0.0, f64::max);
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_by_hand() {
        // X = Y = {0, 1}; P uniform on the diagonal, Q all on the off-diagonal cell (0, 1)
        let (x, y) = (line(&[0.0, 1.0]), line(&[0.0, 1.0]));
        let loss = LossFn::absolute(&y);
        let p = DiscreteMeasure::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let q = DiscreteMeasure::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        // f = identity: R_P = 0, R_Q = |0 - 1| = 1. The swap map has R_P = 1,
        // R_Q = 0. The constants give 1/2 each.
        let r = sup_gap(&x, &y, 1.0, &p, &q, &loss).unwrap();
        assert_eq!(r.sup_gap, 1.0);
        assert_eq!(r.class_size, 4);
        assert_eq!(r.argmax, vec![0, 1]);
    }
}
