use serde::{Deserialize, Serialize};

use crate::metric::FiniteMetricSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `L(y, u) = d_Y(y, u)`.
    Absolute,
    /// `L(y, u) = 1` if `y != u`, else 0.
    ZeroOne,
}

/// A loss tabulated on `Y x Y` with its exact upper Lipschitz constant
/// under the sum metric on `Y x Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossFn {
    pub kind: LossKind,
    k: usize,
    table: Vec<f64>,
    pub lip_upper: f64,
}

impl LossFn {
    pub fn new(kind: LossKind, y: &FiniteMetricSpace) -> Self {
        let k = y.k();
        let mut table = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                table[a * k + b] = match kind {
                    LossKind::Absolute => y.d(a, b),
                    LossKind::ZeroOne => f64::from(u8::from(a != b)),
                };
            }
        }
        let mut lip = 0.0f64;
        for p in 0..k * k {
            for q in p + 1..k * k {
                let dist = y.d(p / k, q / k) + y.d(p % k, q % k);
                lip = lip.max((table[p] - table[q]).abs() / dist);
            }
        }
        Self { kind, k, table, lip_upper: lip }
    }

    pub fn absolute(y: &FiniteMetricSpace) -> Self {
        Self::new(LossKind::Absolute, y)
    }

    pub fn zero_one(y: &FiniteMetricSpace) -> Self {
        Self::new(LossKind::ZeroOne, y)
    }

    /// `L(prediction, label)`.
    pub fn value(&self, prediction: usize, label: usize) -> f64 {
        self.table[prediction * self.k + label]
    }

    pub fn sup(&self) -> f64 {
        self.table.iter().copied().fold(0.0, f64::max)
    }
}
