//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use metric_bounds::metric::FiniteMetricSpace;
use metric_bounds::transport::DiscreteMeasure;
use rand::Rng;

/// Minimum transport cost by enumerating every vertex of the transport
/// polytope: each vertex is supported on a spanning tree of the complete
/// bipartite graph, whose flows are forced and found by peeling leaves.
pub fn wasserstein_by_vertices(space: &FiniteMetricSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let k = space.k();
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let need = 2 * k - 1;
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(need);
    choose(&cells, 0, need, &mut chosen, &mut |subset| {
        if let Some(flows) = tree_flows(k, subset, mu.weights(), nu.weights()) {
            if flows.iter().all(|&x| x >= -1e-12) {
                let c: f64 = subset.iter().zip(&flows).map(|(&(i, j), x)| x * space.d(i, j)).sum();
                best = best.min(c);
            }
        }
    });
    best
}

fn choose<F: FnMut(&[(usize, usize)])>(
    cells: &[(usize, usize)],
    start: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if left == 0 {
        visit(chosen);
        return;
    }
    for s in start..=cells.len() - left {
        chosen.push(cells[s]);
        choose(cells, s + 1, left - 1, chosen, visit);
        chosen.pop();
    }
}

/// Flows on a candidate tree, or `None` if the cells contain a cycle.
fn tree_flows(k: usize, cells: &[(usize, usize)], a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut flows = vec![f64::NAN; cells.len()];
    let mut open: Vec<bool> = vec![true; cells.len()];
    let mut remaining = cells.len();
    while remaining > 0 {
        let mut progressed = false;
        for node in 0..2 * k {
            let incident: Vec<usize> = (0..cells.len())
                .filter(|&c| open[c] && if node < k { cells[c].0 == node } else { cells[c].1 == node - k })
                .collect();
            if incident.len() == 1 {
                let c = incident[0];
                let (i, j) = cells[c];
                let x = if node < k { ra[i] } else { rb[j] };
                flows[c] = x;
                ra[i] -= x;
                rb[j] -= x;
                open[c] = false;
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            return None;
        }
    }
    Some(flows)
}

pub fn random_line_space<R: Rng>(rng: &mut R, k: usize) -> FiniteMetricSpace {
    let mut xs: Vec<f64> = Vec::new();
    while xs.len() < k {
        let x: f64 = rng.random_range(-5.0..5.0);
        if xs.iter().all(|&y| (y - x).abs() > 1e-6) {
            xs.push(x);
        }
    }
    FiniteMetricSpace::from_coords(xs.into_iter().map(|x| vec![x]).collect()).unwrap()
}

/// Random weights with roughly a third of the points left massless.
pub fn random_measure<R: Rng>(rng: &mut R, k: usize) -> DiscreteMeasure {
    loop {
        let raw: Vec<f64> =
            (0..k).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() }).collect();
        if let Ok(m) = DiscreteMeasure::normalized(raw) {
            return m;
        }
    }
}

pub fn random_plane_space<R: Rng>(rng: &mut R, k: usize) -> FiniteMetricSpace {
    let pts: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    FiniteMetricSpace::from_coords(pts).unwrap()
}
