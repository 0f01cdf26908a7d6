use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bounds::{bound_inputs, scan_m};
use super::config::log_grid;
use super::{ExperimentConfig, ExperimentError, ResultRow, ResultTable, Result};
use crate::bounds::occam_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureName {
    RiskBoundSmall,
    RiskBoundLarge,
    PhaseDiagram,
}

impl FigureName {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::RiskBoundSmall => "risk-bound-small",
            FigureName::RiskBoundLarge => "risk-bound-large",
            FigureName::PhaseDiagram => "phase-diagram",
        }
    }
}

impl FromStr for FigureName {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "risk-bound-small" => Ok(FigureName::RiskBoundSmall),
            "risk-bound-large" => Ok(FigureName::RiskBoundLarge),
            "phase-diagram" => Ok(FigureName::PhaseDiagram),
            other => Err(ExperimentError::UnknownFigure(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigurePoint {
    pub n: f64,
    pub m_star: usize,
    pub geometric: f64,
    pub occam: f64,
}

/// Where the minimized geometric bound stops beating the finite-class bound
/// for one `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub k: f64,
    /// Largest scanned `N` at which the geometric bound is smaller.
    pub geometric_wins_until: Option<f64>,
    /// Smallest scanned `N` at which the finite-class bound is smaller.
    pub occam_wins_from: Option<f64>,
    /// Number of sign changes of `geometric - occam` along the scan.
    pub crossings: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub name: FigureName,
    pub csv: String,
    pub script: String,
    pub points: Vec<FigurePoint>,
    pub phase: Vec<PhaseRow>,
    pub table: ResultTable,
}

/// `points` log-spaced sample sizes strictly inside `(lo, hi)`.
fn open_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * (i + 1) as f64 / (points + 1) as f64).exp()).collect()
}

/// Minimized geometric bound and finite-class bound at every `N`.
pub fn figure_curves(config: &ExperimentConfig, ns: &[f64]) -> Result<Vec<FigurePoint>> {
    let inputs = bound_inputs(config)?;
    ns.iter()
        .map(|&n| {
            let at = inputs.with_n(n);
            let best = scan_m(&at, config.m_range, config.bounds.tau_override)?;
            Ok(FigurePoint { n, m_star: best.m_star, geometric: best.value, occam: occam_bound(at.ln_k, at.ln_n, at.delta)? })
        })
        .collect()
}

/// Threshold scan of the two bounds over `N` for each configured `k`.
pub fn phase_diagram(config: &ExperimentConfig) -> Result<Vec<PhaseRow>> {
    let f = &config.figure;
    if f.phase_points < 2 {
        return Err(ExperimentError::config("figure.phase_points", "must be >= 2"));
    }
    let ns = log_grid(f.phase_n.0, f.phase_n.1, f.phase_points);
    f.phase_k
        .iter()
        .map(|&k| {
            let mut c = config.clone();
            c.bounds.k = k;
            let pts = figure_curves(&c, &ns)?;
            let wins: Vec<bool> = pts.iter().map(|p| p.geometric < p.occam).collect();
            Ok(PhaseRow {
                k,
                geometric_wins_until: pts.iter().zip(&wins).filter(|(_, w)| **w).map(|(p, _)| p.n).last(),
                occam_wins_from: pts.iter().zip(&wins).find(|(_, w)| !**w).map(|(p, _)| p.n),
                crossings: wins.windows(2).filter(|w| w[0] != w[1]).count(),
            })
        })
        .collect()
}

fn curves_csv(points: &[FigurePoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "m_star", "geometric", "occam"]).expect("in-memory write");
    for p in points {
        w.write_record([p.n.to_string(), p.m_star.to_string(), p.geometric.to_string(), p.occam.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn phase_csv(rows: &[PhaseRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "geometric_wins_until", "occam_wins_from", "crossings"]).expect("in-memory write");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([r.k.to_string(), opt(r.geometric_wins_until), opt(r.occam_wins_from), r.crossings.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn curves_script(name: &str, title: &str) -> String {
    let mut s = String::new();
    writeln!(s, "# data: {name}.csv (n, m_star, geometric, occam)").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    writeln!(s, "set output '{name}.png'").unwrap();
    writeln!(s, "set title '{title}'").unwrap();
    writeln!(s, "set logscale xy").unwrap();
    writeln!(s, "set format x '10^{{%L}}'").unwrap();
    writeln!(s, "set xlabel 'N'").unwrap();
    writeln!(s, "set ylabel 'bound on the generalization gap'").unwrap();
    writeln!(s, "set key top right").unwrap();
    writeln!(
        s,
        "plot '{name}.csv' every ::1 using 1:3 with lines lw 2 title 'geometric (min over m)', \\\n     \
         '' every ::1 using 1:4 with lines lw 2 dt 2 title 'Occam'"
    )
    .unwrap();
    s
}

fn phase_script(name: &str) -> String {
    let mut s = String::new();
    writeln!(s, "# data: {name}.csv (k, geometric_wins_until, occam_wins_from, crossings)").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    writeln!(s, "set output '{name}.png'").unwrap();
    writeln!(s, "set title 'Sample size where the finite-class bound takes over'").unwrap();
    writeln!(s, "set logscale xy").unwrap();
    writeln!(s, "set xlabel 'k'").unwrap();
    writeln!(s, "set ylabel 'N'").unwrap();
    writeln!(s, "set key top left").unwrap();
    writeln!(
        s,
        "plot '{name}.csv' every ::1 using 1:3 with linespoints lw 2 title 'Occam smaller from here', \\\n     \
         '' every ::1 using 1:2 with linespoints dt 2 title 'geometric smaller up to here'"
    )
    .unwrap();
    s
}

/// Curve data plus a gnuplot script for one figure. Purely analytic: no
/// space is materialized.
pub fn run_figure(name: &str, config: &ExperimentConfig) -> Result<FigureData> {
    let fig: FigureName = name.parse()?;
    config.validate()?;
    let f = &config.figure;
    if f.points == 0 {
        return Err(ExperimentError::config("figure.points", "must be >= 1"));
    }
    let mut table = ResultTable::new(fig.as_str(), config);
    let data = match fig {
        FigureName::RiskBoundSmall | FigureName::RiskBoundLarge => {
            let small = fig == FigureName::RiskBoundSmall;
            let (lo, hi) = if small { f.small } else { f.large };
            if !(lo >= 1.0 && hi > lo && hi.is_finite()) {
                let path = if small { "figure.small" } else { "figure.large" };
                return Err(ExperimentError::config(path, "need 1 <= lo < hi"));
            }
            let points = figure_curves(config, &open_grid(lo, hi, f.points))?;
            for p in &points {
                table.push(ResultRow::new(p.n, None, "occam", p.geometric, p.occam));
            }
            let decreasing = |v: Vec<f64>| v.windows(2).all(|w| w[1] < w[0]);
            if small {
                let below = points.iter().filter(|p| p.geometric < p.occam).count();
                table.assert(
                    "geometric < occam at every N",
                    below == points.len(),
                    format!("{below}/{} points", points.len()),
                );
                table.assert(
                    "both curves strictly decreasing",
                    decreasing(points.iter().map(|p| p.geometric).collect())
                        && decreasing(points.iter().map(|p| p.occam).collect()),
                    "",
                );
            } else {
                let above = points.iter().filter(|p| p.geometric > p.occam).count();
                table.assert(
                    "occam < geometric at every N",
                    above == points.len(),
                    format!("{above}/{} points", points.len()),
                );
            }
            let title = if small { "Small dataset" } else { "Large dataset" };
            FigureData {
                name: fig,
                csv: curves_csv(&points),
                script: curves_script(fig.as_str(), title),
                points,
                phase: Vec::new(),
                table,
            }
        }
        FigureName::PhaseDiagram => {
            let phase = phase_diagram(config)?;
            for r in &phase {
                if let Some(n) = r.occam_wins_from {
                    table.push(ResultRow::new(n, None, format!("occam_wins_from_k={}", r.k), n, n));
                }
            }
            let single = phase.iter().all(|r| r.crossings <= 1);
            table.assert("at most one crossover per k", single, format!("{} values of k", phase.len()));
            FigureData {
                name: fig,
                csv: phase_csv(&phase),
                script: phase_script(fig.as_str()),
                points: Vec::new(),
                phase,
                table,
            }
        }
    };
    let mut data = data;
    data.table.report = serde_json::json!({ "points": data.points, "phase": data.phase });
    Ok(data)
}
