//! Transportation simplex.
//!
//! The bipartite transport problem between supports of sizes `m` and `n` is
//! solved on a spanning tree of `m + n - 1` basic cells. Row potentials `u`
//! and column potentials `v` satisfy `u_i + v_j = c_ij` on the tree; a cell
//! with negative reduced cost `c_ij - u_i - v_j` enters, the unique tree cycle
//! through it is found, and the minus-cell with the least flow leaves.

use std::collections::VecDeque;

use super::{Coupling, DiscreteMeasure, Result, TransportError};
use crate::metric::FiniteMetricSpace;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Quantize costs to integers `round(c * 2^32 / diameter)` before pivoting,
    /// so that every pivot decision is made in exact integer arithmetic. The
    /// returned value is always re-evaluated with the original costs.
    pub exact: bool,
    /// Reduced costs above `-tolerance * max_cost` count as non-negative.
    pub tolerance: f64,
    /// Largest-violation pricing is used for this many pivots, then the
    /// solver switches to lowest-index pricing, which cannot cycle.
    pub dantzig_pivots: usize,
    pub max_pivots: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { exact: false, tolerance: 1e-9, dantzig_pivots: 10_000, max_pivots: 1_000_000 }
    }
}

/// Optimal flow on the reduced problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(row, col, flow)` for every basic cell, zero flows included.
    pub basis: Vec<(usize, usize, f64)>,
    pub pivots: usize,
}

impl TransportPlan {
    pub fn cost(&self, cost: &[Vec<f64>]) -> f64 {
        self.basis.iter().map(|&(i, j, x)| x * cost[i][j]).sum()
    }
}

/// `W_1(mu, nu)` on `space` with the default solver options.
pub fn wasserstein_exact(
    space: &FiniteMetricSpace,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<(f64, Coupling)> {
    wasserstein_with(space, mu, nu, &SolverOptions::default())
}

pub fn wasserstein_with(
    space: &FiniteMetricSpace,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    opts: &SolverOptions,
) -> Result<(f64, Coupling)> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let k = space.k();
    let rows: Vec<usize> = mu.support().collect();
    let cols: Vec<usize> = nu.support().collect();
    let supply: Vec<f64> = rows.iter().map(|&i| mu.weights()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu.weights()[j]).collect();
    let cost: Vec<Vec<f64>> = rows.iter().map(|&i| cols.iter().map(|&j| space.d(i, j)).collect()).collect();

    let plan = if opts.exact && space.diameter() > 0.0 {
        let scale = 2f64.powi(32) / space.diameter();
        let quantized: Vec<Vec<f64>> =
            cost.iter().map(|r| r.iter().map(|c| (c * scale).round()).collect()).collect();
        // integer reduced costs: anything below -1/2 is a genuine violation
        let int_opts = SolverOptions { tolerance: 0.5, ..*opts };
        solve(&supply, &demand, &quantized, &int_opts, true)?
    } else {
        transport_simplex(&supply, &demand, &cost, opts)?
    };

    let mut mass = vec![0.0; k * k];
    let mut value = 0.0;
    for &(r, c, x) in &plan.basis {
        if x > 0.0 {
            mass[rows[r] * k + cols[c]] += x;
            value += x * cost[r][c];
        }
    }
    Ok((value, Coupling::from_flat(k, mass)))
}

/// Solves `min sum c_ij x_ij` subject to row sums `supply`, column sums
/// `demand`, `x >= 0`. Both vectors must be positive and carry equal totals
/// (up to rounding).
pub fn transport_simplex(
    supply: &[f64],
    demand: &[f64],
    cost: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<TransportPlan> {
    solve(supply, demand, cost, opts, false)
}

fn solve(
    supply: &[f64],
    demand: &[f64],
    cost: &[Vec<f64>],
    opts: &SolverOptions,
    absolute_tolerance: bool,
) -> Result<TransportPlan> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(TransportError::InvalidMeasure("empty support".into()));
    }
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(TransportError::DomainMismatch("cost matrix shape".into()));
    }
    let cmax = cost.iter().flatten().fold(0.0f64, |a, &c| a.max(c.abs()));
    let tol = if absolute_tolerance { opts.tolerance } else { opts.tolerance * cmax.max(f64::MIN_POSITIVE) };

    let mut basis = northwest_corner(supply, demand);
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut pivots = 0usize;
    loop {
        potentials(m, n, &basis, cost, &mut u, &mut v);
        let entering = if pivots < opts.dantzig_pivots {
            most_negative(cost, &u, &v, tol)
        } else {
            first_negative(cost, &u, &v, tol)
        };
        let Some((ei, ej)) = entering else {
            return Ok(TransportPlan { basis, pivots });
        };
        if pivots >= opts.max_pivots {
            return Err(TransportError::SolverFailure(format!("no optimum after {pivots} pivots")));
        }
        pivots += 1;

        let path = tree_path(m, n, &basis, ei, ej)?;
        // path[0] touches row ei and takes -theta; signs alternate from there
        let (leave_pos, theta) = path
            .iter()
            .step_by(2)
            .map(|&b| (b, basis[b].2))
            .fold((usize::MAX, f64::INFINITY), |best, (b, x)| {
                let key = |pos: usize| basis[pos].0 * n + basis[pos].1;
                if x < best.1 || (x == best.1 && key(b) < key(best.0)) {
                    (b, x)
                } else {
                    best
                }
            });
        for (t, &b) in path.iter().enumerate() {
            if t % 2 == 0 {
                basis[b].2 = (basis[b].2 - theta).max(0.0);
            } else {
                basis[b].2 += theta;
            }
        }
        basis[leave_pos] = (ei, ej, theta);
    }
}

/// Initial basic feasible solution with exactly `m + n - 1` cells.
fn northwest_corner(supply: &[f64], demand: &[f64]) -> Vec<(usize, usize, f64)> {
    let (m, n) = (supply.len(), demand.len());
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    let mut basis = Vec::with_capacity(m + n - 1);
    loop {
        let x = if i == m - 1 {
            b[j]
        } else if j == n - 1 {
            a[i]
        } else {
            a[i].min(b[j])
        }
        .max(0.0);
        basis.push((i, j, x));
        a[i] -= x;
        b[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 || (j < n - 1 && a[i] >= b[j]) {
            j += 1;
        } else {
            i += 1;
        }
    }
    basis
}

fn tree_adjacency(m: usize, n: usize, basis: &[(usize, usize, f64)]) -> Vec<Vec<(usize, usize)>> {
    // nodes 0..m are rows, m..m+n are columns; edges carry the basis position
    let mut adj = vec![Vec::new(); m + n];
    for (pos, &(i, j, _)) in basis.iter().enumerate() {
        adj[i].push((m + j, pos));
        adj[m + j].push((i, pos));
    }
    adj
}

fn potentials(m: usize, n: usize, basis: &[(usize, usize, f64)], cost: &[Vec<f64>], u: &mut [f64], v: &mut [f64]) {
    let adj = tree_adjacency(m, n, basis);
    let mut seen = vec![false; m + n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    u[0] = 0.0;
    while let Some(node) = queue.pop_front() {
        for &(next, pos) in &adj[node] {
            if seen[next] {
                continue;
            }
            seen[next] = true;
            let (i, j, _) = basis[pos];
            if next >= m {
                v[j] = cost[i][j] - u[i];
            } else {
                u[i] = cost[i][j] - v[j];
            }
            queue.push_back(next);
        }
    }
}

fn most_negative(cost: &[Vec<f64>], u: &[f64], v: &[f64], tol: f64) -> Option<(usize, usize)> {
    let mut best = None;
    let mut best_r = -tol;
    for (i, row) in cost.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let r = c - u[i] - v[j];
            if r < best_r {
                best_r = r;
                best = Some((i, j));
            }
        }
    }
    best
}

fn first_negative(cost: &[Vec<f64>], u: &[f64], v: &[f64], tol: f64) -> Option<(usize, usize)> {
    for (i, row) in cost.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c - u[i] - v[j] < -tol {
                return Some((i, j));
            }
        }
    }
    None
}

/// Basis positions along the tree path from row `ei` to column `ej`.
fn tree_path(m: usize, n: usize, basis: &[(usize, usize, f64)], ei: usize, ej: usize) -> Result<Vec<usize>> {
    let adj = tree_adjacency(m, n, basis);
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    let mut queue = VecDeque::from([ei]);
    seen[ei] = true;
    let target = m + ej;
    while let Some(node) = queue.pop_front() {
        if node == target {
            break;
        }
        for &(next, pos) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, pos));
                queue.push_back(next);
            }
        }
    }
    if !seen[target] {
        return Err(TransportError::SolverFailure("basis is not a spanning tree".into()));
    }
    let mut path = Vec::new();
    let mut node = target;
    while let Some((prev, pos)) = parent[node] {
        path.push(pos);
        node = prev;
    }
    path.reverse();
    Ok(path)
}

/// `W_1` on the line as the area between the two CDFs.
pub fn wasserstein_1d_oracle(space: &FiniteMetricSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let coords = space.coords().ok_or(TransportError::NotOneDimensional)?;
    if space.ambient_dim() != Some(1) {
        return Err(TransportError::NotOneDimensional);
    }
    let mut order: Vec<usize> = (0..space.k()).collect();
    order.sort_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0]));
    let (mut fa, mut fb, mut area) = (0.0, 0.0, 0.0);
    for w in order.windows(2) {
        fa += mu.weights()[w[0]];
        fb += nu.weights()[w[0]];
        area += (fa - fb).abs() * (coords[w[1]][0] - coords[w[0]][0]);
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_coords(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn m(w: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(w.to_vec()).unwrap()
    }

    #[test]
    fn two_diracs() {
        let s = line(&[0.0, 3.0]);
        let (v, c) = wasserstein_exact(&s, &DiscreteMeasure::dirac(2, 0), &DiscreteMeasure::dirac(2, 1)).unwrap();
        assert_eq!(v, 3.0);
        assert_eq!(c.get(0, 1), 1.0);
        assert_eq!(wasserstein_1d_oracle(&s, &DiscreteMeasure::dirac(2, 0), &DiscreteMeasure::dirac(2, 1)).unwrap(), 3.0);
    }

    #[test]
    fn shifted_halves() {
        let s = line(&[0.0, 1.0, 2.0]);
        let (mu, nu) = (m(&[0.5, 0.5, 0.0]), m(&[0.0, 0.5, 0.5]));
        let (v, c) = wasserstein_exact(&s, &mu, &nu).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(c.marginal_error(&mu, &nu) < 1e-12);
        assert!((c.cost(&s) - v).abs() < 1e-12);
        assert!((wasserstein_1d_oracle(&s, &mu, &nu).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_measures_use_the_diagonal() {
        let s = line(&[0.0, 0.4, 2.0, 3.5]);
        let mu = m(&[0.1, 0.2, 0.3, 0.4]);
        let (v, c) = wasserstein_exact(&s, &mu, &mu).unwrap();
        assert_eq!(v, 0.0);
        for i in 0..4 {
            assert!((c.get(i, i) - mu.weights()[i]).abs() < 1e-15);
        }
        assert_eq!(wasserstein_1d_oracle(&s, &mu, &mu).unwrap(), 0.0);
    }

    #[test]
    fn exact_mode_agrees() {
        let s = line(&[0.0, 0.3, 1.1, 1.7, 2.9]);
        let mu = m(&[0.3, 0.1, 0.2, 0.15, 0.25]);
        let nu = m(&[0.05, 0.4, 0.05, 0.3, 0.2]);
        let fast = wasserstein_exact(&s, &mu, &nu).unwrap().0;
        let exact = wasserstein_with(&s, &mu, &nu, &SolverOptions { exact: true, ..Default::default() }).unwrap().0;
        let oracle = wasserstein_1d_oracle(&s, &mu, &nu).unwrap();
        assert!((fast - oracle).abs() < 1e-12);
        assert!((exact - oracle).abs() < 1e-9);
    }

    #[test]
    fn lowest_index_pricing_reaches_the_optimum() {
        let s = line(&[0.0, 0.3, 1.1, 1.7, 2.9]);
        let mu = m(&[0.3, 0.1, 0.2, 0.15, 0.25]);
        let nu = m(&[0.05, 0.4, 0.05, 0.3, 0.2]);
        let opts = SolverOptions { dantzig_pivots: 0, ..Default::default() };
        let v = wasserstein_with(&s, &mu, &nu, &opts).unwrap().0;
        assert!((v - wasserstein_1d_oracle(&s, &mu, &nu).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_spaces() {
        let s = line(&[0.0, 1.0]);
        assert!(matches!(
            wasserstein_exact(&s, &DiscreteMeasure::uniform(3), &DiscreteMeasure::uniform(2)),
            Err(TransportError::MarginalMismatch { .. })
        ));
        let plane = FiniteMetricSpace::from_coords(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let u = DiscreteMeasure::uniform(2);
        assert_eq!(wasserstein_1d_oracle(&plane, &u, &u), Err(TransportError::NotOneDimensional));
    }

    #[test]
    fn northwest_corner_has_tree_size() {
        let b = northwest_corner(&[0.5, 0.5], &[0.25, 0.25, 0.5]);
        assert_eq!(b.len(), 4);
        let b = northwest_corner(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(b.len(), 3);
    }
}
