use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replicate_stream, EmbeddingChoice, ExperimentConfig, ResultRow, ResultTable, Result, SETUP_STREAM};
use crate::bounds::{concentration_bounds, BoundInputs};
use crate::embed::{bourgain_embed, identity_embed, line_embed_heuristic, Embedding};
use crate::metric::FiniteMetricSpace;
use crate::rng::stream_rng;
use crate::transport::{empirical, sample_with, wasserstein_exact, DiscreteMeasure};

/// Aggregates at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSummary {
    pub n: f64,
    pub replicates: Vec<f64>,
    pub mean: f64,
    /// `(level, empirical quantile, bound)`.
    pub quantiles: Vec<(f64, f64, f64)>,
    pub c1: f64,
    pub c2: f64,
    /// `diameter / sqrt(N)`.
    pub eps: f64,
    /// Fraction of replicates with `|W - mean| > C2 + eps`.
    pub deviation_frequency: f64,
    pub tail: f64,
}

/// Embedding used for the distortion and dimension of the constants.
pub(crate) fn choose_embedding(space: &FiniteMetricSpace, choice: EmbeddingChoice, seed: u64) -> Result<Embedding> {
    Ok(match choice {
        EmbeddingChoice::Identity => identity_embed(space, space.ambient_dim().unwrap_or(0))?,
        EmbeddingChoice::Line => line_embed_heuristic(space)?,
        EmbeddingChoice::Bourgain => bourgain_embed(space, &mut stream_rng(seed, SETUP_STREAM - 1))?,
    })
}

/// Order statistic at level `q` (nearest rank).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// For every `N`: `R` samples of size `N` from the configured measure, the
/// exact distance `W(P, P^N)` of each, and the comparison with `C1` and
/// with the deviation tail at `eps = diameter / sqrt(N)`.
///
/// The expectation in the deviation event is replaced by the replicate mean.
pub fn run_concentration(config: &ExperimentConfig) -> Result<(ResultTable, Vec<ConcentrationSummary>)> {
    config.validate()?;
    for &q in &config.concentration.quantiles {
        if !(q > 0.0 && q < 1.0) {
            return Err(super::ExperimentError::config("concentration.quantiles", format!("{q} outside (0, 1)")));
        }
    }
    let space = config.space.materialize(config.seed)?;
    let mu = config.measure.build(space.k())?;
    let emb = choose_embedding(&space, config.concentration.embedding, config.seed)?;
    let base = BoundInputs {
        ln_k: (space.k() as f64).ln(),
        ln_n: 0.0,
        m: emb.m,
        delta: config.delta,
        diameter: space.diameter(),
        lip_hyp: 1.0,
        lip_loss: 1.0,
        delta_noise: 0.0,
        euclidean_d: space.ambient_dim(),
    };

    let mut table = ResultTable::new("concentration", config);
    let mut summaries = Vec::new();
    for (i, &n) in config.n_grid.values().iter().enumerate() {
        let size = n.round() as usize;
        let ws = replicate_distances(&space, &mu, size, config.replicates, config.seed, i)?;
        let cb = concentration_bounds(&base.with_n(size as f64), emb.tau)?;
        let mean = ws.iter().sum::<f64>() / ws.len() as f64;
        let eps = space.diameter() / (size as f64).sqrt();
        let hits = ws.iter().filter(|w| (*w - mean).abs() > cb.c2 + eps).count();
        let mut sorted = ws.clone();
        sorted.sort_by(f64::total_cmp);
        let quantiles = config
            .concentration
            .quantiles
            .iter()
            .map(|&q| {
                // W <= E W + C2 + eps_q with probability >= q
                let eps_q = cb.tau * cb.diameter * ((2.0 / (1.0 - q)).ln() / (2.0 * cb.n)).sqrt();
                (q, quantile(&sorted, q), cb.c1 + cb.c2 + eps_q)
            })
            .collect::<Vec<_>>();
        let s = ConcentrationSummary {
            n: size as f64,
            mean,
            quantiles,
            c1: cb.c1,
            c2: cb.c2,
            eps,
            deviation_frequency: hits as f64 / ws.len() as f64,
            tail: cb.tail(eps),
            replicates: ws,
        };

        for (r, w) in s.replicates.iter().enumerate() {
            table.push(ResultRow::new(s.n, Some(r), "w", *w, s.c1));
        }
        table.push(ResultRow::new(s.n, None, "mean_w", s.mean, s.c1));
        for (q, v, b) in &s.quantiles {
            table.push(ResultRow::new(s.n, None, format!("q{}_w", q * 100.0), *v, *b));
        }
        table.push(ResultRow::new(s.n, None, "deviation_frequency", s.deviation_frequency, s.tail));
        summaries.push(s);
    }

    let slack = config.thresholds.tail_slack;
    let worst_mean = summaries.iter().map(|s| s.c1 - s.mean).fold(f64::INFINITY, f64::min);
    table.assert("mean W <= C1 at every N", worst_mean >= 0.0, format!("smallest margin {worst_mean}"));
    let worst_tail = summaries.iter().map(|s| s.tail + slack - s.deviation_frequency).fold(f64::INFINITY, f64::min);
    table.assert(
        "deviation frequency <= tail + slack at every N",
        worst_tail >= 0.0,
        format!("slack {slack}, smallest margin {worst_tail}"),
    );
    let monotone = summaries.windows(2).all(|w| w[1].mean <= w[0].mean);
    let warnings: Vec<String> = if monotone {
        Vec::new()
    } else {
        vec!["empirical means are not non-increasing in N".to_string()]
    };
    table.report = serde_json::json!({
        "k": space.k(),
        "diameter": space.diameter(),
        "embedding": { "m": emb.m, "tau": emb.tau, "recipe": emb.recipe },
        "summaries": summaries.iter().map(|s| serde_json::json!({
            "n": s.n, "mean": s.mean, "c1": s.c1, "c2": s.c2, "eps": s.eps,
            "deviation_frequency": s.deviation_frequency, "tail": s.tail, "quantiles": s.quantiles,
        })).collect::<Vec<_>>(),
        "warnings": warnings,
    });
    Ok((table, summaries))
}

/// `W(P, P^N)` for `reps` independent samples; replicate `r` uses stream
/// `(grid_index, r)`.
pub(crate) fn replicate_distances(
    space: &FiniteMetricSpace,
    mu: &DiscreteMeasure,
    n: usize,
    reps: usize,
    seed: u64,
    grid_index: usize,
) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, replicate_stream(grid_index, r));
            let batch = sample_with(mu, n, &mut rng)?;
            let q = empirical(&batch, space.k())?;
            Ok(wasserstein_exact(space, mu, &q)?.0)
        })
        .collect()
}
