use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentError, ResultRow, ResultTable, Result};
use crate::bounds::{
    best_bound_over_m, classifier_lip_bound, dim_const, generalization_bound, occam_bound, rademacher_bound, rate_r,
    stability_bound, BestBound, BoundInputs, RateTableRow,
};

/// Bound inputs described by the `bounds` section, at `N = 1` and `m = 1`.
pub fn bound_inputs(config: &ExperimentConfig) -> Result<BoundInputs> {
    let b = &config.bounds;
    let ln_k = b.k.ln();
    let diameter = match (b.diameter, b.euclidean_d) {
        (Some(d), _) => d,
        (None, Some(d)) => (d as f64).sqrt() + 1.0,
        (None, None) => {
            return Err(ExperimentError::config("bounds.diameter", "required when bounds.euclidean_d is absent"))
        }
    };
    let lip_hyp = match (b.lip_hyp, b.euclidean_d) {
        (Some(l), _) => l,
        (None, Some(d)) => classifier_lip_bound(ln_k, d, None)?.crude,
        (None, None) => 1.0,
    };
    let inputs = BoundInputs {
        ln_k,
        ln_n: 0.0,
        m: 1,
        delta: config.delta,
        diameter,
        lip_hyp,
        lip_loss: b.lip_loss,
        delta_noise: b.delta_noise,
        euclidean_d: b.euclidean_d,
    };
    inputs.validate().map_err(|e| ExperimentError::config("bounds", e.to_string()))?;
    if let Some(t) = b.tau_override {
        if !(t >= 1.0 && t.is_finite()) {
            return Err(ExperimentError::config("bounds.tau_override", format!("{t} must be finite and >= 1")));
        }
    }
    Ok(inputs)
}

/// Minimum over `m` of the generalization bound, with either the worst-case
/// distortion or a fixed override at every `m`.
pub(crate) fn scan_m(inputs: &BoundInputs, range: (usize, usize), tau_override: Option<f64>) -> Result<BestBound> {
    let Some(tau) = tau_override else {
        return Ok(best_bound_over_m(inputs, range.0..=range.1)?);
    };
    let mut rows = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for m in range.0..=range.1 {
        let value = generalization_bound(&inputs.with_m(m), tau)?;
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((m, value));
        }
        rows.push(RateTableRow {
            m,
            r_m_at_n: rate_r(m, inputs.ln_n),
            c_tilde_m: dim_const(m),
            tau_worstcase: Some(tau),
            regime: None,
            bound: Some(value),
            skipped: None,
        });
    }
    let (m_star, value) = best.expect("range is non-empty");
    Ok(BestBound { m_star, value, rows })
}

/// Bound values at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub n: f64,
    pub m_star: usize,
    pub geometric: f64,
    pub occam: f64,
    pub stability: Option<f64>,
    pub rademacher: Option<f64>,
    pub rate_table: Vec<RateTableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub inputs: BoundInputs,
    pub tau_override: Option<f64>,
    pub rows: Vec<BoundsRow>,
}

impl BoundsReport {
    /// Columns `n,m_star,geometric,occam,stability,rademacher`.
    pub fn to_wide_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "m_star", "geometric", "occam", "stability", "rademacher"]).expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.m_star.to_string(),
                r.geometric.to_string(),
                r.occam.to_string(),
                opt(r.stability),
                opt(r.rademacher),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Columns `n,m,r_m,c_tilde,tau,regime,bound,skipped`.
    pub fn to_rate_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "m", "r_m", "c_tilde", "tau", "regime", "bound", "skipped"]).expect("in-memory write");
        for r in &self.rows {
            for t in &r.rate_table {
                let regime = t
                    .regime
                    .map(|g| serde_json::to_value(g).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
                    .unwrap_or_default();
                w.write_record([
                    r.n.to_string(),
                    t.m.to_string(),
                    t.r_m_at_n.to_string(),
                    t.c_tilde_m.to_string(),
                    t.tau_worstcase.map(|x| x.to_string()).unwrap_or_default(),
                    regime,
                    t.bound.map(|x| x.to_string()).unwrap_or_default(),
                    t.skipped.clone().unwrap_or_default(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Bound values at every `N` of the grid.
pub(crate) fn bounds_rows(config: &ExperimentConfig, inputs: &BoundInputs, grid: &[f64]) -> Result<Vec<BoundsRow>> {
    let tau_override = config.bounds.tau_override;
    grid.iter()
        .map(|&n| {
            let at_n = inputs.with_n(n);
            let best = scan_m(&at_n, config.m_range, tau_override)?;
            let occam = occam_bound(at_n.ln_k, at_n.ln_n, at_n.delta)?;
            let (stability, rademacher) = match at_n.euclidean_d {
                Some(d) => (
                    (d > 3).then(|| stability_bound(at_n.ln_k, d, at_n.ln_n, at_n.delta)).transpose()?,
                    Some(rademacher_bound(d, at_n.lip_hyp, at_n.ln_n, at_n.delta, 1.0)?.total),
                ),
                None => (None, None),
            };
            Ok(BoundsRow {
                n,
                m_star: best.m_star,
                geometric: best.value,
                occam,
                stability,
                rademacher,
                rate_table: best.rows,
            })
        })
        .collect()
}

/// Rate table, `m*`, the minimized bound and the competitor bounds at every
/// `N` of the grid. Long-form rows compare the geometric bound (value)
/// against each competitor (bound).
pub fn run_bounds(config: &ExperimentConfig) -> Result<(ResultTable, BoundsReport)> {
    config.validate()?;
    let inputs = bound_inputs(config)?;
    let rows = bounds_rows(config, &inputs, &config.n_grid.values())?;
    let mut table = ResultTable::new("bounds", config);
    for r in &rows {
        table.push(ResultRow::new(r.n, None, "occam", r.geometric, r.occam));
        if let Some(s) = r.stability {
            table.push(ResultRow::new(r.n, None, "stability", r.geometric, s));
        }
        if let Some(s) = r.rademacher {
            table.push(ResultRow::new(r.n, None, "rademacher", r.geometric, s));
        }
    }
    let finite = rows.iter().all(|r| r.geometric.is_finite() && r.geometric > 0.0);
    table.assert("geometric bound finite and positive", finite, format!("{} sample sizes", rows.len()));
    let report = BoundsReport { inputs, tau_override: config.bounds.tau_override, rows };
    table.report = serde_json::to_value(&report).expect("report serializes");
    Ok((table, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::NGrid;

    #[test]
    fn tau_override_matches_identity_formula() {
        let mut c = ExperimentConfig::default();
        c.bounds.tau_override = Some(1.0);
        c.m_range = (100, 100);
        c.n_grid = NGrid::List(vec![50.0, 5_000.0]);
        let (_, report) = run_bounds(&c).unwrap();
        let inputs = bound_inputs(&c).unwrap();
        for r in &report.rows {
            let direct = generalization_bound(&inputs.with_n(r.n).with_m(100), 1.0).unwrap();
            assert_eq!(r.geometric, direct);
        }
        // the worst-case table gives the same value at m = d
        c.bounds.tau_override = None;
        let (_, plain) = run_bounds(&c).unwrap();
        assert_eq!(plain.rows[0].geometric, report.rows[0].geometric);
    }

    #[test]
    fn missing_diameter_is_a_config_error() {
        let mut c = ExperimentConfig::default();
        c.bounds.euclidean_d = None;
        assert!(matches!(run_bounds(&c), Err(ExperimentError::Config { path, .. }) if path == "bounds.diameter"));
    }
}
