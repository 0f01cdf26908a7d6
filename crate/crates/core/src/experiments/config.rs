use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result, SETUP_STREAM};
use crate::metric::{greedy_packing, DyadicGrid, FiniteMetricSpace, SpaceDocument, DEFAULT_AUDIT_BUDGET};
use crate::rng::stream_rng;
use crate::transport::DiscreteMeasure;

/// One JSON document drives every subcommand. Sections a subcommand does not
/// read are ignored. Every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Monte-Carlo replicates per grid point.
    pub replicates: usize,
    /// Confidence parameter.
    pub delta: f64,
    pub n_grid: NGrid,
    /// Inclusive range of representation dimensions `[lo, hi]`.
    pub m_range: (usize, usize),
    pub space: SpaceSource,
    pub measure: MeasureSource,
    pub concentration: ConcentrationConfig,
    pub bounds: BoundsConfig,
    pub gap: GapConfig,
    pub audit: AuditConfig,
    pub figure: FigureConfig,
    pub wasserstein: WassersteinConfig,
    pub thresholds: Thresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            replicates: 200,
            delta: 0.05,
            n_grid: NGrid::List(vec![100.0, 1_000.0, 10_000.0]),
            m_range: (1, 100),
            space: SpaceSource::RandomLine { k: 10 },
            measure: MeasureSource::Uniform,
            concentration: ConcentrationConfig::default(),
            bounds: BoundsConfig::default(),
            gap: GapConfig::default(),
            audit: AuditConfig::default(),
            figure: FigureConfig::default(),
            wasserstein: WassersteinConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

/// Sample sizes, either listed or log-spaced with both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NGrid {
    List(Vec<f64>),
    Log { start: f64, stop: f64, points: usize },
}

impl NGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            NGrid::List(v) => v.clone(),
            NGrid::Log { start, stop, points } => log_grid(*start, *stop, *points),
        }
    }
}

/// `points` log-spaced values from `start` to `stop` inclusive.
pub(crate) fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSource {
    /// An explicit space in the `{"points", "dist"}` schema.
    Inline(SpaceDocument),
    /// The dyadic grid with `d`, `p` and mantissa bound `M`.
    Grid {
        d: usize,
        p: u32,
        #[serde(rename = "M")]
        m: u64,
    },
    /// A greedy `delta`-packing of the unit cube.
    Packing { d: usize, delta: f64, budget: Option<usize> },
    /// `k` uniform points of `[0, 1]`.
    RandomLine { k: usize },
    /// `k` uniform points of `[0, 1]^d`.
    RandomCloud { k: usize, d: usize },
}

impl SpaceSource {
    /// Builds the space. Random sources draw from the setup stream of `seed`.
    pub fn materialize(&self, seed: u64) -> Result<FiniteMetricSpace> {
        let mut rng = stream_rng(seed, SETUP_STREAM);
        let space = match self {
            SpaceSource::Inline(doc) => FiniteMetricSpace::from_document(doc.clone())?,
            SpaceSource::Grid { d, p, m } => DyadicGrid::new(*d, *p, *m)?.to_space()?,
            SpaceSource::Packing { d, delta, budget } => {
                greedy_packing(*d, *delta, &mut rng, budget.unwrap_or(DEFAULT_AUDIT_BUDGET))?.to_space()?
            }
            SpaceSource::RandomLine { k } => {
                check_count("space.k", *k)?;
                FiniteMetricSpace::from_coords((0..*k).map(|_| vec![rng.random::<f64>()]).collect())?
            }
            SpaceSource::RandomCloud { k, d } => {
                check_count("space.k", *k)?;
                if *d == 0 {
                    return Err(ExperimentError::config("space.d", "must be >= 1"));
                }
                FiniteMetricSpace::from_coords((0..*k).map(|_| (0..*d).map(|_| rng.random()).collect()).collect())?
            }
        };
        Ok(space)
    }
}

fn check_count(path: &str, k: usize) -> Result<()> {
    if k == 0 {
        Err(ExperimentError::config(path, "must be >= 1"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSource {
    Uniform,
    Dirac(usize),
    Weights(Vec<f64>),
}

impl MeasureSource {
    pub fn build(&self, k: usize) -> Result<DiscreteMeasure> {
        match self {
            MeasureSource::Uniform => Ok(DiscreteMeasure::uniform(k)),
            MeasureSource::Dirac(at) if *at < k => Ok(DiscreteMeasure::dirac(k, *at)),
            MeasureSource::Dirac(at) => Err(ExperimentError::config("measure.dirac", format!("{at} >= k = {k}"))),
            MeasureSource::Weights(w) if w.len() == k => Ok(DiscreteMeasure::new(w.clone())?),
            MeasureSource::Weights(w) => {
                Err(ExperimentError::config("measure.weights", format!("{} weights for {k} points", w.len())))
            }
        }
    }
}

/// Embedding whose distortion enters the concentration constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingChoice {
    /// The space's own coordinates (`m` = ambient dimension, `tau = 1`).
    Identity,
    /// One-dimensional classical-scaling heuristic.
    Line,
    /// Bourgain's random Frechet embedding.
    Bourgain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub embedding: EmbeddingChoice,
    /// Levels of the reported quantiles of `W`.
    pub quantiles: Vec<f64>,
}

impl Default for ConcentrationConfig {
    fn default() -> Self {
        Self { embedding: EmbeddingChoice::Identity, quantiles: vec![0.5, 0.9, 0.95, 0.99] }
    }
}

/// Inputs of the analytic bound table that are not measured from a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    /// Number of points; may be astronomically large.
    pub k: f64,
    pub euclidean_d: Option<usize>,
    /// Defaults to `sqrt(d) + 1`, the diameter of `[0,1]^d x {0,1}`.
    pub diameter: Option<f64>,
    /// Defaults to the crude classifier estimate `2 k^{1/d}`.
    pub lip_hyp: Option<f64>,
    pub lip_loss: f64,
    pub delta_noise: f64,
    /// Replaces the worst-case distortion at every `m` when set.
    pub tau_override: Option<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            k: 1e15,
            euclidean_d: Some(100),
            diameter: None,
            lip_hyp: None,
            lip_loss: 1.0,
            delta_noise: 0.0,
            tau_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapConfig {
    /// Points of `X`, uniform in `[0,1]^x_dim`.
    pub x_points: usize,
    pub x_dim: usize,
    /// Points of `Y`, uniform in `[0,1]`.
    pub y_points: usize,
    /// Lipschitz bound of the hypothesis class.
    pub lip: f64,
    /// `absolute` or `zero_one`.
    pub loss: String,
    pub n: usize,
    /// Total-variation distance between the sampling measure and the
    /// noiseless graph measure. Zero samples from the graph of `f*`.
    pub noise_tv: Option<f64>,
    /// Noise level assumed by the estimation bound.
    pub delta_noise: f64,
    pub m_max: usize,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            x_points: 4,
            x_dim: 2,
            y_points: 3,
            lip: 1.0,
            loss: "absolute".into(),
            n: 100,
            noise_tv: None,
            delta_noise: 0.0,
            m_max: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMetric {
    /// Uniform points of `[0,1]^dim` with the Euclidean metric.
    Euclidean,
    /// Shortest paths on a random connected weighted graph.
    RandomGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub sizes: Vec<usize>,
    pub seeds: usize,
    pub metric: AuditMetric,
    pub dim: usize,
    /// JL target dimension as a multiple of `ceil(8 ln k)`; the result is
    /// rounded up and kept strictly above the threshold.
    pub jl_factor: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { sizes: vec![8, 16, 32, 64], seeds: 100, metric: AuditMetric::Euclidean, dim: 3, jl_factor: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigureConfig {
    pub points: usize,
    /// Open interval of the small-data panel.
    pub small: (f64, f64),
    /// Open interval of the large-data panel.
    pub large: (f64, f64),
    /// `k` values of the phase diagram.
    pub phase_k: Vec<f64>,
    /// Scan range of the phase diagram.
    pub phase_n: (f64, f64),
    pub phase_points: usize,
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            points: 50,
            small: (10.0, 1e4),
            large: (1e16, 1e18),
            phase_k: vec![1e3, 1e6, 1e9, 1e12, 1e15],
            phase_n: (10.0, 1e24),
            phase_points: 2301,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WassersteinConfig {
    pub mu: Option<Vec<f64>>,
    pub nu: Option<Vec<f64>>,
    /// Integer-quantized costs.
    pub exact: bool,
}

/// Pass thresholds of the statistical assertions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Minimum coverage of the generalization bound.
    pub coverage: f64,
    /// Minimum fraction of seeds whose measured distortion is within the table.
    pub audit_pass: f64,
    /// Allowed excess of the deviation frequency over the tail bound.
    pub tail_slack: f64,
    /// Tolerance of deterministic inequalities.
    pub tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { coverage: 0.90, audit_pass: 0.95, tail_slack: 0.05, tolerance: 1e-9 }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks the invariants shared by every subcommand.
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(ExperimentError::config("replicates", "must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ExperimentError::config("delta", format!("{} outside (0, 1)", self.delta)));
        }
        if let NGrid::Log { start, stop, points } = self.n_grid {
            if points == 0 || !(start >= 1.0) || !(stop.is_finite()) {
                return Err(ExperimentError::config("n_grid", "log grid needs points >= 1 and 1 <= start"));
            }
        }
        let grid = self.n_grid.values();
        if grid.is_empty() {
            return Err(ExperimentError::config("n_grid", "empty"));
        }
        if grid.iter().any(|n| !(*n >= 1.0 && n.is_finite())) {
            return Err(ExperimentError::config("n_grid", "sample sizes must be finite and >= 1"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ExperimentError::config("n_grid", "must be strictly increasing"));
        }
        let (lo, hi) = self.m_range;
        if lo == 0 || hi < lo {
            return Err(ExperimentError::config("m_range", format!("[{lo}, {hi}] is not a range of positive integers")));
        }
        if !(self.bounds.k >= 1.0 && self.bounds.k.is_finite()) {
            return Err(ExperimentError::config("bounds.k", "must be finite and >= 1"));
        }
        let t = &self.thresholds;
        for (path, v) in [("thresholds.coverage", t.coverage), ("thresholds.audit_pass", t.audit_pass)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ExperimentError::config(path, format!("{v} outside [0, 1]")));
            }
        }
        if !(t.tail_slack >= 0.0 && t.tolerance >= 0.0) {
            return Err(ExperimentError::config("thresholds", "slack and tolerance must be non-negative"));
        }
        Ok(())
    }
}
