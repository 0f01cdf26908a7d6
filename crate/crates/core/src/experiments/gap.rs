use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replicate_stream, ExperimentConfig, ExperimentError, ResultRow, ResultTable, Result, SETUP_STREAM};
use crate::bounds::{best_bound_over_m, estimation_bound, generalization_bound, BoundInputs};
use crate::embed::{bourgain_embed, line_embed_heuristic};
use crate::learning::{enumerate_class, sup_gap, LossFn, LossKind};
use crate::metric::{product_space, FiniteMetricSpace};
use crate::rng::stream_rng;
use crate::transport::{empirical, graph_pushforward, sample_with, tv_distance, wasserstein_exact, DiscreteMeasure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub n: usize,
    pub replicates: usize,
    pub lbar: f64,
    pub diameter: f64,
    /// Worst-case-distortion generalization bound, minimized over `m`.
    pub generalization_worstcase: f64,
    pub m_star: usize,
    /// Estimation bound at the same `m*`.
    pub estimation_worstcase: f64,
    /// Generalization bound with the best measured distortion.
    pub generalization_realized: f64,
    pub realized_tau: f64,
    pub realized_m: usize,
    /// TV distance between the sampling measure and the graph measure, when
    /// noise was injected.
    pub noise_tv: Option<f64>,
    pub sup_gaps: Vec<f64>,
    pub lbar_w: Vec<f64>,
    /// Replicates with `sup_gap <= Lbar W` (up to tolerance).
    pub chain_holds: usize,
    pub coverage_worstcase: f64,
    pub coverage_realized: f64,
}

struct Setup {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    xy: FiniteMetricSpace,
    p: DiscreteMeasure,
    noise_tv: Option<f64>,
}

fn setup(config: &ExperimentConfig, lip: f64) -> Result<Setup> {
    let g = &config.gap;
    if g.x_points == 0 || g.y_points == 0 || g.x_dim == 0 {
        return Err(ExperimentError::config("gap", "x_points, x_dim and y_points must be >= 1"));
    }
    let mut rng = stream_rng(config.seed, SETUP_STREAM);
    let x = FiniteMetricSpace::from_coords(
        (0..g.x_points).map(|_| (0..g.x_dim).map(|_| rng.random::<f64>()).collect()).collect(),
    )?;
    let y = FiniteMetricSpace::from_coords((0..g.y_points).map(|_| vec![rng.random::<f64>()]).collect())?;
    let xy = product_space(&x, &y)?;
    let k = xy.k();
    let (p, noise_tv) = match g.noise_tv {
        None => (DiscreteMeasure::normalized((0..k).map(|_| rng.random::<f64>()).collect())?, None),
        Some(t) => {
            if !(0.0..=1.0).contains(&t) {
                return Err(ExperimentError::config("gap.noise_tv", format!("{t} outside [0, 1]")));
            }
            let class = enumerate_class(&x, &y, lip)?;
            let f = &class.choose(&mut rng).expect("constant maps are always in the class").table;
            let mu_x = DiscreteMeasure::normalized((0..x.k()).map(|_| rng.random::<f64>()).collect())?;
            let graph = graph_pushforward(&mu_x, f, y.k())?;
            // noise spread uniformly over the cells off the graph, which
            // puts the sampling measure at TV distance exactly t
            let off: Vec<f64> = graph.weights().iter().map(|w| if *w > 0.0 { 0.0 } else { 1.0 }).collect();
            let p = if off.iter().all(|v| *v == 0.0) || t == 0.0 {
                graph.clone()
            } else {
                let off = DiscreteMeasure::normalized(off)?;
                DiscreteMeasure::normalized(
                    graph.weights().iter().zip(off.weights()).map(|(a, b)| (1.0 - t) * a + t * b).collect(),
                )?
            };
            let tv = tv_distance(&p, &graph)?;
            (p, Some(tv))
        }
    };
    Ok(Setup { x, y, xy, p, noise_tv })
}

/// Generalization-gap study on a small product space `X x Y`.
///
/// Each replicate draws `N` samples, computes the exact supremum of the
/// risk gap over the Lipschitz class, the exact `W(P, P^N)` and the bounds.
/// The first link `sup_gap <= Lbar W` is deterministic; the bound links hold
/// with probability `1 - delta`.
pub fn run_gap(config: &ExperimentConfig) -> Result<(ResultTable, GapSummary)> {
    config.validate()?;
    let g = &config.gap;
    let kind = match g.loss.as_str() {
        "absolute" => LossKind::Absolute,
        "zero_one" => LossKind::ZeroOne,
        other => return Err(ExperimentError::config("gap.loss", format!("unknown loss `{other}`"))),
    };
    if g.n == 0 {
        return Err(ExperimentError::config("gap.n", "must be >= 1"));
    }
    if !(g.lip >= 0.0 && g.lip.is_finite()) {
        return Err(ExperimentError::config("gap.lip", "must be finite and non-negative"));
    }
    let s = setup(config, g.lip)?;
    let loss = LossFn::new(kind, &s.y);
    let inputs = BoundInputs {
        ln_k: (s.xy.k() as f64).ln(),
        ln_n: (g.n as f64).ln(),
        m: 1,
        delta: config.delta,
        diameter: s.xy.diameter(),
        lip_hyp: g.lip,
        lip_loss: loss.lip_upper,
        delta_noise: g.delta_noise,
        euclidean_d: None,
    };
    inputs.validate().map_err(|e| ExperimentError::config("gap", e.to_string()))?;
    let lbar = inputs.lbar();

    let best = best_bound_over_m(&inputs, 1..=g.m_max.max(1))?;
    let at_star = inputs.with_m(best.m_star);
    let tau_star = best.rows.iter().find(|r| r.m == best.m_star).and_then(|r| r.tau_worstcase).unwrap_or(1.0);
    let estimation_worstcase = estimation_bound(&at_star, tau_star)?;

    // realized distortion: the better of the line heuristic and Bourgain
    let mut candidates = vec![line_embed_heuristic(&s.xy)?];
    candidates.push(bourgain_embed(&s.xy, &mut stream_rng(config.seed, SETUP_STREAM - 1))?);
    let (generalization_realized, realized_tau, realized_m) = candidates
        .iter()
        .map(|e| Ok((generalization_bound(&inputs.with_m(e.m), e.tau)?, e.tau, e.m)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("two candidates");

    let per_rep: Vec<(f64, f64)> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(config.seed, replicate_stream(0, r));
            let batch = sample_with(&s.p, g.n, &mut rng)?;
            let q = empirical(&batch, s.xy.k())?;
            let gap = sup_gap(&s.x, &s.y, g.lip, &s.p, &q, &loss)?.sup_gap;
            let w = wasserstein_exact(&s.xy, &s.p, &q)?.0;
            Ok((gap, lbar * w))
        })
        .collect::<Result<Vec<_>>>()?;

    let tol = config.thresholds.tolerance;
    let n = g.n as f64;
    let mut table = ResultTable::new("gap", config);
    let mut chain_holds = 0;
    let (mut cov_w, mut cov_r) = (0usize, 0usize);
    for (r, &(gap, lw)) in per_rep.iter().enumerate() {
        chain_holds += usize::from(gap <= lw + tol);
        cov_w += usize::from(gap <= best.value);
        cov_r += usize::from(lw <= generalization_realized);
        table.push(ResultRow::new(n, Some(r), "sup_gap_vs_lbar_w", gap, lw));
        table.push(ResultRow::new(n, Some(r), "lbar_w_vs_realized", lw, generalization_realized));
        table.push(ResultRow::new(n, Some(r), "generalization_worstcase", gap, best.value));
        table.push(ResultRow::new(n, Some(r), "estimation_worstcase", gap, estimation_worstcase));
    }
    let reps = per_rep.len();
    let summary = GapSummary {
        n: g.n,
        replicates: reps,
        lbar,
        diameter: inputs.diameter,
        generalization_worstcase: best.value,
        m_star: best.m_star,
        estimation_worstcase,
        generalization_realized,
        realized_tau,
        realized_m,
        noise_tv: s.noise_tv,
        sup_gaps: per_rep.iter().map(|p| p.0).collect(),
        lbar_w: per_rep.iter().map(|p| p.1).collect(),
        chain_holds,
        coverage_worstcase: cov_w as f64 / reps as f64,
        coverage_realized: cov_r as f64 / reps as f64,
    };
    table.assert(
        "sup_gap <= Lbar W in every replicate",
        chain_holds == reps,
        format!("{chain_holds}/{reps} (tolerance {tol})"),
    );
    table.assert(
        "worst-case generalization bound coverage",
        summary.coverage_worstcase >= config.thresholds.coverage,
        format!("{} >= {}", summary.coverage_worstcase, config.thresholds.coverage),
    );
    let mut report = serde_json::to_value(&summary).expect("summary serializes");
    report["rate_table"] = serde_json::to_value(&best.rows).expect("rows serialize");
    table.report = report;
    Ok((table, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.replicates = 20;
        c.delta = 0.1;
        c
    }

    #[test]
    fn chain_holds_on_default_setup() {
        let (t, s) = run_gap(&small()).unwrap();
        assert_eq!(s.chain_holds, 20);
        assert!(t.malformed_rows().is_empty());
        // no noise: estimation and generalization coincide
        assert_eq!(s.estimation_worstcase, s.generalization_worstcase);
    }

    #[test]
    fn noise_shifts_estimation_by_lbar_d_delta() {
        let mut c = small();
        c.gap.noise_tv = Some(0.2);
        c.gap.delta_noise = 0.25;
        let (_, s) = run_gap(&c).unwrap();
        assert!((s.noise_tv.unwrap() - 0.2).abs() < 1e-12);
        let shift = s.estimation_worstcase - s.generalization_worstcase;
        assert!((shift - s.lbar * s.diameter * 0.25).abs() < 1e-9 * s.estimation_worstcase);
    }

    #[test]
    fn noiseless_graph_measure() {
        let mut c = small();
        c.gap.noise_tv = Some(0.0);
        let (_, s) = run_gap(&c).unwrap();
        assert_eq!(s.noise_tv, Some(0.0));
        assert_eq!(s.estimation_worstcase, s.generalization_worstcase);
    }
}
