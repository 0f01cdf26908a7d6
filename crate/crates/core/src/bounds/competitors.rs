use std::f64::consts::{LN_2, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{BoundError, Result};

/// Attached to every ReLU corollary value.
pub const RELU_CONSTANT_CAVEAT: &str =
    "value is the corollary's expression with its unnamed constant multiple set to 1; only ratios are meaningful";

fn check_delta(delta: f64, closed_top: bool) -> Result<()> {
    let ok = delta > 0.0 && if closed_top { delta <= 1.0 } else { delta < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(BoundError::InvalidInput(format!("delta = {delta} out of range")))
    }
}

/// Finite-class bound `sqrt(ln(2/delta) + k ln 2) / sqrt(2N)`.
pub fn occam_bound(ln_k: f64, ln_n: f64, delta: f64) -> Result<f64> {
    check_delta(delta, false)?;
    // k ln 2 can be ~1e15: the sum is formed directly, which is exact enough,
    // and the division by sqrt(2N) is done in log space
    let numerator = (2.0 / delta).ln() + ln_k.exp() * LN_2;
    Ok((0.5 * numerator.ln() - 0.5 * (LN_2 + ln_n)).exp())
}

/// The three terms of the Rademacher-complexity bound for `L`-Lipschitz
/// `[0,1]`-valued functions on `[0,1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RademacherTerms {
    pub first: f64,
    pub second: f64,
    pub third: f64,
    pub total: f64,
}

pub fn rademacher_bound(d: usize, lip: f64, ln_n: f64, delta: f64, loss_sup: f64) -> Result<RademacherTerms> {
    if d == 0 {
        return Err(BoundError::InvalidInput("d must be >= 1".into()));
    }
    check_delta(delta, true)?;
    let df = d as f64;
    let n_rate = (-ln_n / (df + 3.0)).exp();
    let lip_factor = (16.0 * df.sqrt() * lip).powf(1.0 / (1.0 + 3.0 / df));
    let first = 2.0 * n_rate * (8.0 * (df + 1.0).powi(2)).powf(1.0 / (df + 3.0)) * lip_factor;
    let second =
        4.0 * SQRT_2 * n_rate * lip_factor / (8.0 * (df + 1.0)).powf((1.0 + 1.0 / df) / (1.0 + 3.0 / df));
    let third = loss_sup * (8.0 * (2.0 / delta).ln() * (-ln_n).exp()).sqrt();
    Ok(RademacherTerms { first, second, third, total: first + second + third })
}

/// Lipschitz estimates for binary classifiers on a `k`-point packing of
/// `[0,1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierLipschitz {
    /// `1 / min_dist`, when the packing's minimum distance is known.
    pub exact: Option<f64>,
    /// `2 k^{1/d} / sqrt(d)`.
    pub packing: f64,
    /// `2 k^{1/d}`.
    pub crude: f64,
}

pub fn classifier_lip_bound(ln_k: f64, d: usize, min_dist: Option<f64>) -> Result<ClassifierLipschitz> {
    if d == 0 {
        return Err(BoundError::InvalidInput("d must be >= 1".into()));
    }
    if let Some(md) = min_dist {
        if !(md > 0.0) {
            return Err(BoundError::InvalidInput(format!("minimum distance {md} must be positive")));
        }
    }
    let crude = 2.0 * (ln_k / d as f64).exp();
    Ok(ClassifierLipschitz { exact: min_dist.map(|md| 1.0 / md), packing: crude / (d as f64).sqrt(), crude })
}

/// `2 k^{1/d} (4 sqrt(d) / N^{1/d} + sqrt(ln(2/delta)) / sqrt(N))`, the
/// precision-independent bound from the identity representation.
pub fn stability_bound(ln_k: f64, d: usize, ln_n: f64, delta: f64) -> Result<f64> {
    if d <= 3 {
        return Err(BoundError::DomainError(format!("stability bound needs d > 3, got {d}")));
    }
    check_delta(delta, true)?;
    let df = d as f64;
    let lead = 2.0 * (ln_k / df).exp();
    Ok(lead * (4.0 * df.sqrt() * (-ln_n / df).exp() + (2.0 / delta).ln().sqrt() * (-0.5 * ln_n).exp()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReluCorollary {
    pub value: f64,
    pub ln_value: f64,
    pub constant: f64,
    pub caveat: String,
}

/// `2^{(d+1)(p+1)} sqrt(d) M^{d+2} K ceil(Lambda*) B sqrt(ln(2/delta)) / sqrt(N)`,
/// evaluated in log space.
#[allow(clippy::too_many_arguments)]
pub fn relu_corollary_bound(
    d: usize,
    p: u32,
    mantissa: u64,
    k_dict: usize,
    lambda_star: f64,
    weight_bound: f64,
    ln_n: f64,
    delta: f64,
) -> Result<ReluCorollary> {
    if d == 0 || mantissa == 0 || k_dict == 0 || !(lambda_star > 0.0) || !(weight_bound > 0.0) {
        return Err(BoundError::InvalidInput("corollary parameters must be positive".into()));
    }
    check_delta(delta, false)?;
    let df = d as f64;
    let ln_value = (df + 1.0) * (p as f64 + 1.0) * LN_2
        + 0.5 * df.ln()
        + (df + 2.0) * (mantissa as f64).ln()
        + (k_dict as f64).ln()
        + lambda_star.ceil().ln()
        + weight_bound.ln()
        + 0.5 * (2.0 / delta).ln().ln()
        - 0.5 * ln_n;
    Ok(ReluCorollary { value: ln_value.exp(), ln_value, constant: 1.0, caveat: RELU_CONSTANT_CAVEAT.into() })
}
