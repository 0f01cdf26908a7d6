use std::f64::consts::{LN_2, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{BoundError, BoundInputs, Result};

/// Concentration rate `r_m(N)`.
pub fn rate_r(m: usize, ln_n: f64) -> f64 {
    match m {
        0 => f64::NAN,
        1 => (-0.5 * ln_n).exp(),
        2 => (32.0 + ln_n / LN_2) * (-0.5 * ln_n).exp(),
        _ => (-ln_n / m as f64).exp(),
    }
}

/// Dimension constant `C~_m`.
pub fn dim_const(m: usize) -> f64 {
    match m {
        0 => f64::NAN,
        1 => 1.0 / (8f64.sqrt() - 2.0),
        2 => SQRT_2 / 4.0,
        _ => {
            let m = m as f64;
            let h = m / 2.0 - 1.0;
            let base = h / (2.0 * (1.0 - 2f64.powf(1.0 - m / 2.0)));
            2.0 * base.powf(2.0 / m) * (1.0 + 1.0 / (2.0 * h)) * m.sqrt()
        }
    }
}

/// `eps_{m,k} = 2 sqrt(2) sqrt(ln k) / sqrt(m)`.
pub fn eps(m: usize, ln_k: f64) -> f64 {
    2.0 * SQRT_2 * ln_k.sqrt() / (m as f64).sqrt()
}

/// `sqrt((sqrt m + 2 sqrt 2 sqrt(ln k)) / (sqrt m - 2 sqrt 2 sqrt(ln k)))`.
pub fn eps_tilde(m: usize, ln_k: f64) -> Result<f64> {
    let a = 2.0 * SQRT_2 * ln_k.sqrt();
    let s = (m as f64).sqrt();
    if s - a <= 0.0 {
        return Err(BoundError::DomainError(format!(
            "eps_tilde needs m > 8 ln k, got m = {m}, 8 ln k = {}",
            8.0 * ln_k
        )));
    }
    Ok(((s + a) / (s - a)).sqrt())
}

/// Which worst-case distortion row applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `m in {1, 2}`.
    Line,
    /// `3 <= m <= ceil(8 ln k)`.
    Low,
    /// `ceil(8 ln k) < m < 2^k`.
    High,
    /// `m >= 2^k`.
    Saturated,
    /// Euclidean input, `m >= d`.
    Identity,
    EuclideanLine,
    EuclideanLow,
    EuclideanHigh,
}

/// `k` recovered from `ln k`, snapped to the nearest integer when it is one.
fn count(ln_k: f64) -> f64 {
    let k = ln_k.exp();
    let r = k.round();
    if (k - r).abs() <= 1e-9 * r.max(1.0) {
        r
    } else {
        k
    }
}

fn low_cutoff(ln_k: f64) -> usize {
    (8.0 * ln_k).ceil() as usize
}

fn floor_term(ln_k: f64) -> f64 {
    (2.0 * ln_k + 1.0).floor()
}

/// Worst-case distortion `tau(phi_m)` and the row it came from. With
/// `euclidean_d` set, the Euclidean rows are used.
pub fn worstcase_tau(m: usize, ln_k: f64, euclidean_d: Option<usize>) -> Result<(f64, Regime)> {
    if m == 0 {
        return Err(BoundError::InvalidInput("m must be >= 1".into()));
    }
    let mf = m as f64;
    let twelve_k = 12.0 * count(ln_k);
    let cutoff = low_cutoff(ln_k);
    if let Some(d) = euclidean_d {
        if m >= d {
            return Ok((1.0, Regime::Identity));
        }
        if m <= 2 {
            return Ok((twelve_k, Regime::EuclideanLine));
        }
        if m <= cutoff {
            let v = (15f64.ln() + 2.0 * ln_k / mf).exp() * (ln_k / mf).sqrt();
            return Ok((v, Regime::EuclideanLow));
        }
        return Ok((48.0 * floor_term(ln_k) * eps_tilde(m, ln_k)?, Regime::EuclideanHigh));
    }
    if m <= 2 {
        return Ok((twelve_k, Regime::Line));
    }
    if m <= cutoff {
        let v = (720f64.ln() + 2.0 * ln_k / mf).exp()
            * floor_term(ln_k)
            * (ln_k / mf).sqrt()
            * eps_tilde(m, ln_k)?;
        return Ok((v, Regime::Low));
    }
    if mf.log2() < count(ln_k) {
        return Ok((48.0 * floor_term(ln_k) * eps_tilde(m, ln_k)?, Regime::High));
    }
    Ok((48.0 * floor_term(ln_k), Regime::Saturated))
}

/// Concentration constants for a given distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationBounds {
    /// Bound on the expected Wasserstein distance.
    pub c1: f64,
    /// Offset of the deviation event.
    pub c2: f64,
    pub tau: f64,
    pub n: f64,
    pub diameter: f64,
}

impl ConcentrationBounds {
    /// `2 exp(-2 N eps^2 / (tau^2 d^2))`.
    pub fn tail(&self, eps: f64) -> f64 {
        2.0 * (-2.0 * self.n * eps * eps / (self.tau * self.tau * self.diameter * self.diameter)).exp()
    }
}

pub fn concentration_bounds(inputs: &BoundInputs, tau: f64) -> Result<ConcentrationBounds> {
    inputs.validate()?;
    check_tau(tau)?;
    let base = dim_const(inputs.m) * inputs.diameter * rate_r(inputs.m, inputs.ln_n);
    Ok(ConcentrationBounds { c1: base * tau, c2: base * (tau - 1.0), tau, n: inputs.n(), diameter: inputs.diameter })
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 1.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(BoundError::InvalidInput(format!("distortion {tau} must be a finite number >= 1")))
    }
}

/// `Lbar d (C~_m (2 tau - 1) r_m(N) + tau sqrt(ln(2/delta)) / sqrt(2N))`.
pub fn generalization_bound(inputs: &BoundInputs, tau: f64) -> Result<f64> {
    inputs.validate()?;
    check_tau(tau)?;
    let m = inputs.m;
    let rate = dim_const(m) * (2.0 * tau - 1.0) * rate_r(m, inputs.ln_n);
    let conf = tau * (2.0 / inputs.delta).ln().sqrt() * (-0.5 * (2f64.ln() + inputs.ln_n)).exp();
    Ok(inputs.lbar() * inputs.diameter * (rate + conf))
}

/// Generalization bound plus `Lbar d Delta`.
pub fn estimation_bound(inputs: &BoundInputs, tau: f64) -> Result<f64> {
    Ok(generalization_bound(inputs, tau)? + inputs.lbar() * inputs.diameter * inputs.delta_noise)
}

/// One line of the rate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTableRow {
    pub m: usize,
    pub r_m_at_n: f64,
    pub c_tilde_m: f64,
    pub tau_worstcase: Option<f64>,
    pub regime: Option<Regime>,
    pub bound: Option<f64>,
    /// Why the row has no value, when it has none.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestBound {
    pub m_star: usize,
    pub value: f64,
    pub rows: Vec<RateTableRow>,
}

/// Evaluates the generalization bound with the worst-case distortion at each
/// `m` and returns the smallest (earliest `m` on ties). Rows whose distortion
/// formula is undefined are kept in the table, marked as skipped.
pub fn best_bound_over_m<I: IntoIterator<Item = usize>>(inputs: &BoundInputs, ms: I) -> Result<BestBound> {
    inputs.validate()?;
    let mut rows = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for m in ms {
        let mut row = RateTableRow {
            m,
            r_m_at_n: rate_r(m, inputs.ln_n),
            c_tilde_m: dim_const(m),
            tau_worstcase: None,
            regime: None,
            bound: None,
            skipped: None,
        };
        match worstcase_tau(m, inputs.ln_k, inputs.euclidean_d) {
            Ok((tau, regime)) => {
                let value = generalization_bound(&inputs.with_m(m), tau)?;
                row.tau_worstcase = Some(tau);
                row.regime = Some(regime);
                row.bound = Some(value);
                if best.is_none_or(|(_, b)| value < b) {
                    best = Some((m, value));
                }
            }
            Err(BoundError::DomainError(why)) => row.skipped = Some(why),
            Err(e) => return Err(e),
        }
        rows.push(row);
    }
    let (m_star, value) = best.ok_or_else(|| BoundError::DomainError("no m in the range has a defined bound".into()))?;
    Ok(BestBound { m_star, value, rows })
}
