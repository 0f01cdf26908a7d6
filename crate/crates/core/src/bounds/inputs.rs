use serde::{Deserialize, Serialize};

use super::{BoundError, Result};

/// Everything the bound formulas read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// `ln k`, with `k` the number of points of the (product) space.
    pub ln_k: f64,
    /// `ln N`.
    pub ln_n: f64,
    /// Representation dimension.
    pub m: usize,
    /// Confidence parameter in `(0, 1)`.
    pub delta: f64,
    /// Diameter of the space the measure lives on.
    pub diameter: f64,
    /// Lipschitz bound `L` of the hypothesis class.
    pub lip_hyp: f64,
    /// Upper Lipschitz constant of the loss.
    pub lip_loss: f64,
    /// Noise level in `[0, 2]`; enters the estimation bound only.
    pub delta_noise: f64,
    /// Ambient dimension when the space sits in `R^d`.
    pub euclidean_d: Option<usize>,
}

impl BoundInputs {
    /// Inputs for `k` points and `n` samples with unit diameter, unit
    /// Lipschitz constants, `m = 1`, `delta = 0.05` and no noise.
    pub fn from_counts(k: f64, n: f64) -> Self {
        Self {
            ln_k: k.ln(),
            ln_n: n.ln(),
            m: 1,
            delta: 0.05,
            diameter: 1.0,
            lip_hyp: 1.0,
            lip_loss: 1.0,
            delta_noise: 0.0,
            euclidean_d: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BoundError::InvalidInput(msg));
        if !(self.ln_k.is_finite() && self.ln_k >= 0.0) {
            return bad(format!("ln k = {} (need k >= 1)", self.ln_k));
        }
        if !(self.ln_n.is_finite() && self.ln_n >= 0.0) {
            return bad(format!("ln N = {} (need N >= 1)", self.ln_n));
        }
        if self.m == 0 {
            return bad("m must be >= 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta = {} outside (0, 1)", self.delta));
        }
        if !(self.diameter > 0.0 && self.diameter.is_finite()) {
            return bad(format!("diameter = {}", self.diameter));
        }
        if !(self.lip_hyp >= 0.0 && self.lip_hyp.is_finite() && self.lip_loss >= 0.0 && self.lip_loss.is_finite()) {
            return bad("Lipschitz constants must be finite and non-negative".into());
        }
        if !(0.0..=2.0).contains(&self.delta_noise) {
            return bad(format!("noise level {} outside [0, 2]", self.delta_noise));
        }
        if self.euclidean_d == Some(0) {
            return bad("ambient dimension must be >= 1".into());
        }
        Ok(())
    }

    /// `L_u(loss) * max(1, L)`.
    pub fn lbar(&self) -> f64 {
        self.lip_loss * self.lip_hyp.max(1.0)
    }

    pub fn k(&self) -> f64 {
        self.ln_k.exp()
    }

    pub fn n(&self) -> f64 {
        self.ln_n.exp()
    }

    pub fn with_m(&self, m: usize) -> Self {
        Self { m, ..self.clone() }
    }

    pub fn with_n(&self, n: f64) -> Self {
        Self { ln_n: n.ln(), ..self.clone() }
    }
}
