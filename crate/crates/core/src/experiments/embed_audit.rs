use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replicate_stream, AuditMetric, ExperimentConfig, ExperimentError, ResultRow, ResultTable, Result};
use crate::bounds::worstcase_tau;
use crate::embed::{bourgain_embed, bourgain_shape, identity_embed, jl_reduce, line_embed_heuristic};
use crate::metric::FiniteMetricSpace;
use crate::rng::stream_rng;

/// Pass counts for one space size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub k: usize,
    pub seeds: usize,
    pub bourgain_dim: usize,
    pub jl_dim: usize,
    pub bourgain_table: f64,
    pub jl_table: f64,
    pub bourgain_pass: usize,
    pub jl_pass: usize,
    pub line_pass: usize,
    /// Seeds where the identity embedding measured exactly 1 (Euclidean
    /// inputs only).
    pub identity_exact: Option<usize>,
    pub max_tau_bourgain: f64,
    pub max_tau_jl: f64,
}

/// JL target dimension: `jl_factor * ceil(8 ln k)`, rounded up and kept
/// above the threshold.
pub(crate) fn jl_dimension(k: usize, factor: f64) -> usize {
    let min = (8.0 * (k as f64).ln()).ceil() as usize;
    ((factor * min as f64).ceil() as usize).max(min + 1)
}

/// Shortest-path metric of a random connected graph: a random spanning tree
/// plus each remaining edge with probability 0.3, weights uniform in
/// `[0.1, 1]`.
pub(crate) fn random_graph_metric<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<FiniteMetricSpace> {
    let mut d = vec![vec![f64::INFINITY; k]; k];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let join = |d: &mut Vec<Vec<f64>>, a: usize, b: usize, w: f64| {
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[a][b];
    };
    for i in 1..k {
        let j = rng.random_range(0..i);
        let w = rng.random_range(0.1..=1.0);
        join(&mut d, i, j, w);
    }
    for i in 0..k {
        for j in i + 1..k {
            if rng.random::<f64>() < 0.3 {
                let w = rng.random_range(0.1..=1.0);
                join(&mut d, i, j, w);
            }
        }
    }
    // Floyd-Warshall
    for via in 0..k {
        for i in 0..k {
            for j in 0..k {
                let alt = d[i][via] + d[via][j];
                if alt < d[i][j] {
                    d[i][j] = alt;
                }
            }
        }
    }
    Ok(FiniteMetricSpace::new(d, None)?)
}

struct SeedResult {
    bourgain: f64,
    jl: f64,
    line: f64,
    identity: Option<f64>,
}

/// Measured distortion of Bourgain, Bourgain followed by JL, the line
/// heuristic and (for Euclidean inputs) the identity, against the
/// worst-case table at each construction's dimension.
pub fn run_embed_audit(config: &ExperimentConfig) -> Result<(ResultTable, Vec<AuditSummary>)> {
    config.validate()?;
    let a = &config.audit;
    if a.seeds == 0 {
        return Err(ExperimentError::config("audit.seeds", "must be >= 1"));
    }
    if a.sizes.iter().any(|&k| k < 2) {
        return Err(ExperimentError::config("audit.sizes", "every size must be >= 2"));
    }
    if a.metric == AuditMetric::Euclidean && a.dim == 0 {
        return Err(ExperimentError::config("audit.dim", "must be >= 1"));
    }
    if !(a.jl_factor > 0.0 && a.jl_factor.is_finite()) {
        return Err(ExperimentError::config("audit.jl_factor", "must be positive"));
    }

    let mut table = ResultTable::new("embed-audit", config);
    let mut summaries = Vec::new();
    for (i, &k) in a.sizes.iter().enumerate() {
        let ln_k = (k as f64).ln();
        let jl_m = jl_dimension(k, a.jl_factor);
        let results: Vec<(SeedResult, usize)> = (0..a.seeds)
            .into_par_iter()
            .map(|s| {
                let mut rng = stream_rng(config.seed, replicate_stream(i, s));
                let space = match a.metric {
                    AuditMetric::Euclidean => FiniteMetricSpace::from_coords(
                        (0..k).map(|_| (0..a.dim).map(|_| rng.random::<f64>()).collect()).collect(),
                    )?,
                    AuditMetric::RandomGraph => random_graph_metric(k, &mut rng)?,
                };
                let b = bourgain_embed(&space, &mut rng)?;
                let jl = jl_reduce(&space, &b, jl_m, &mut rng)?;
                let line = line_embed_heuristic(&space)?;
                let identity = match space.ambient_dim() {
                    Some(d) => Some(identity_embed(&space, d)?.tau),
                    None => None,
                };
                Ok((SeedResult { bourgain: b.tau, jl: jl.tau, line: line.tau, identity }, b.m))
            })
            .collect::<Result<Vec<_>>>()?;

        let bourgain_dim = bourgain_shape(k).0 * bourgain_shape(k).1;
        let (bourgain_table, _) = worstcase_tau(bourgain_dim, ln_k, None)?;
        let (jl_table, _) = worstcase_tau(jl_m, ln_k, None)?;
        let (line_table, _) = worstcase_tau(1, ln_k, None)?;
        let kf = k as f64;
        let mut summary = AuditSummary {
            k,
            seeds: a.seeds,
            bourgain_dim,
            jl_dim: jl_m,
            bourgain_table,
            jl_table,
            bourgain_pass: 0,
            jl_pass: 0,
            line_pass: 0,
            identity_exact: (a.metric == AuditMetric::Euclidean).then_some(0),
            max_tau_bourgain: 0.0,
            max_tau_jl: 0.0,
        };
        for (s, (r, dim)) in results.iter().enumerate() {
            // a dropped empty coordinate changes the dimension, and with it the table
            let bourgain_table = if *dim == bourgain_dim { bourgain_table } else { worstcase_tau(*dim, ln_k, None)?.0 };
            summary.bourgain_pass += usize::from(r.bourgain <= bourgain_table);
            summary.jl_pass += usize::from(r.jl <= jl_table);
            summary.line_pass += usize::from(r.line <= line_table);
            summary.max_tau_bourgain = summary.max_tau_bourgain.max(r.bourgain);
            summary.max_tau_jl = summary.max_tau_jl.max(r.jl);
            table.push(ResultRow::new(kf, Some(s), "tau_bourgain", r.bourgain, bourgain_table));
            table.push(ResultRow::new(kf, Some(s), "tau_bourgain_jl", r.jl, jl_table));
            table.push(ResultRow::new(kf, Some(s), "tau_line", r.line, line_table));
            if let Some(t) = r.identity {
                if let Some(c) = summary.identity_exact.as_mut() {
                    *c += usize::from(t == 1.0);
                }
                table.push(ResultRow::new(kf, Some(s), "tau_identity", t, 1.0));
            }
        }
        let need = config.thresholds.audit_pass;
        let frac = |p: usize| p as f64 / a.seeds as f64;
        table.assert(
            &format!("k={k} Bourgain tau within table"),
            frac(summary.bourgain_pass) >= need,
            format!("{}/{} seeds, table {bourgain_table:.4} at m={bourgain_dim}", summary.bourgain_pass, a.seeds),
        );
        table.assert(
            &format!("k={k} Bourgain+JL tau within table"),
            frac(summary.jl_pass) >= need,
            format!("{}/{} seeds, table {jl_table:.4} at m={jl_m}", summary.jl_pass, a.seeds),
        );
        if let Some(c) = summary.identity_exact {
            table.assert(&format!("k={k} identity tau exactly 1"), c == a.seeds, format!("{c}/{} seeds", a.seeds));
        }
        summaries.push(summary);
    }

    // the three-point illustration: A=(0,0), B=(2,0), C=(1,1) on a line
    let tri = FiniteMetricSpace::from_coords(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]])?;
    let tri_tau = line_embed_heuristic(&tri)?.tau;
    let (tri_table, _) = worstcase_tau(1, 3f64.ln(), None)?;
    table.push(ResultRow::new(3.0, None, "tau_line_triangle", tri_tau, tri_table));
    table.assert(
        "three-point line heuristic within table",
        tri_tau <= tri_table,
        format!("tau {tri_tau}, table {tri_table}"),
    );
    table.report = serde_json::json!({ "sizes": summaries, "triangle": { "tau": tri_tau, "table": tri_table } });
    Ok((table, summaries))
}
