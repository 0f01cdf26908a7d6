use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentError, ResultRow, ResultTable, Result};
use crate::transport::{tv_distance, wasserstein_with, DiscreteMeasure, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WassersteinReport {
    pub value: f64,
    pub tv: f64,
    pub diameter: f64,
    pub marginal_error: f64,
    pub exact: bool,
    /// Dense coupling, one row per source point.
    pub coupling_csv: String,
}

/// Exact `W(mu, nu)` on the configured space. Missing measures default to
/// uniform (`mu`) and the Dirac mass at point 0 (`nu`).
pub fn run_wasserstein(config: &ExperimentConfig) -> Result<(ResultTable, WassersteinReport)> {
    config.validate()?;
    let space = config.space.materialize(config.seed)?;
    let k = space.k();
    let load = |path: &str, w: &Option<Vec<f64>>, fallback: DiscreteMeasure| -> Result<DiscreteMeasure> {
        match w {
            None => Ok(fallback),
            Some(v) if v.len() != k => Err(ExperimentError::config(path, format!("{} weights for {k} points", v.len()))),
            Some(v) => Ok(DiscreteMeasure::new(v.clone())?),
        }
    };
    let mu = load("wasserstein.mu", &config.wasserstein.mu, DiscreteMeasure::uniform(k))?;
    let nu = load("wasserstein.nu", &config.wasserstein.nu, DiscreteMeasure::dirac(k, 0))?;
    let opts = SolverOptions { exact: config.wasserstein.exact, ..SolverOptions::default() };
    let (value, coupling) = wasserstein_with(&space, &mu, &nu, &opts)?;
    let tv = tv_distance(&mu, &nu)?;
    let report = WassersteinReport {
        value,
        tv,
        diameter: space.diameter(),
        marginal_error: coupling.marginal_error(&mu, &nu),
        exact: opts.exact,
        coupling_csv: coupling.to_csv(),
    };
    let mut table = ResultTable::new("wasserstein", config);
    table.push(ResultRow::new(k as f64, None, "w_vs_diameter_tv", value, report.diameter * tv));
    let tol = config.thresholds.tolerance;
    table.assert(
        "W <= diameter * TV",
        value <= report.diameter * tv + tol,
        format!("{value} vs {}", report.diameter * tv),
    );
    table.assert("coupling marginals", report.marginal_error <= tol, format!("error {}", report.marginal_error));
    table.report = serde_json::json!({
        "value": value, "tv": tv, "diameter": report.diameter,
        "marginal_error": report.marginal_error, "exact": opts.exact,
    });
    Ok((table, report))
}
