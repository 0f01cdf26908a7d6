use serde::{Deserialize, Serialize};

use super::{LearningError, Result};
use crate::metric::FiniteMetricSpace;

/// Largest input space whose full class `Y^X` is enumerated.
pub const MAX_CLASS_INPUTS: usize = 6;
pub const MAX_CLASS_OUTPUTS: usize = 4;

/// A map between point indices of two finite spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub table: Vec<usize>,
    pub lip_upper: f64,
}

impl Hypothesis {
    pub fn new(table: Vec<usize>, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Self> {
        if table.len() != x.k() {
            return Err(LearningError::ShapeMismatch(format!("table of {} entries for {} points", table.len(), x.k())));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= y.k()) {
            return Err(LearningError::ShapeMismatch(format!("image {bad} outside 0..{}", y.k())));
        }
        let lip_upper = lipschitz_upper(&table, x, y);
        Ok(Self { table, lip_upper })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }
}

/// `max_{x != x'} d_Y(f(x), f(x')) / d_X(x, x')`; 0 on a single point.
pub fn lipschitz_upper(table: &[usize], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut best = 0.0f64;
    for i in 0..table.len() {
        for j in i + 1..table.len() {
            best = best.max(y.d(table[i], table[j]) / x.d(i, j));
        }
    }
    best
}

/// Every map `X -> Y` with upper Lipschitz constant at most `lip`, in
/// lexicographic order of tables.
pub fn enumerate_class(x: &FiniteMetricSpace, y: &FiniteMetricSpace, lip: f64) -> Result<Vec<Hypothesis>> {
    let (kx, ky) = (x.k(), y.k());
    if kx > MAX_CLASS_INPUTS || ky > MAX_CLASS_OUTPUTS {
        return Err(LearningError::ClassTooLarge { k_x: kx, k_y: ky });
    }
    let total = ky.pow(kx as u32);
    let mut out = Vec::new();
    let mut table = vec![0usize; kx];
    for code in 0..total {
        let mut c = code;
        for slot in table.iter_mut().rev() {
            *slot = c % ky;
            c /= ky;
        }
        let l = lipschitz_upper(&table, x, y);
        // tiny slack so that ratios equal to lip in exact arithmetic are kept
        if l <= lip * (1.0 + 1e-12) {
            out.push(Hypothesis { table: table.clone(), lip_upper: l });
        }
    }
    Ok(out)
}
