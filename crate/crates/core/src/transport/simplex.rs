//! Transportation simplex for the quadratic-cost discrete transport problem.
//!
//! Start from the northwest-corner basis (degenerate zero cells included so
//! that the basis always has `m + n - 1` cells forming a spanning tree), then
//! pivot with the most negative reduced cost. After a degenerate pivot the
//! next choice falls back to Bland's rule (lowest index entering and leaving)
//! until the objective moves again, which rules out cycling.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::linalg::Vector;

use super::Coupling;

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Primal transport cost.
    pub cost: f64,
    /// Primal cost minus the value of a feasible dual solution.
    pub dual_gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct W2Solution {
    pub distance: f64,
    pub coupling: Coupling,
    pub certificate: Certificate,
}

const DEGENERATE_STEP: f64 = 1e-15;
/// Supply and demand closer than this are rounding copies of the same mass.
const MASS_ROUNDING: f64 = 1e-15;

/// Exact `W_2(mu, nu)` with an optimal coupling and its duality certificate.
pub fn exact_w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<W2Solution> {
    if mu.ambient_dim() != nu.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "measures live in dimensions {} and {}",
            mu.ambient_dim(),
            nu.ambient_dim()
        )));
    }
    let (xs, a): (Vec<&Vector>, Vec<f64>) = mu.support().map(|(_, x, w)| (x, w)).unzip();
    let (ys, b): (Vec<&Vector>, Vec<f64>) = nu.support().map(|(_, y, w)| (y, w)).unzip();
    let cost: Vec<Vec<f64>> = xs.iter().map(|x| ys.iter().map(|y| (*x - *y).norm_squared()).collect()).collect();

    let mut problem = Transportation::northwest_corner(&a, &b, cost);
    let iterations = problem.solve()?;
    let (primal, dual_gap) = problem.certificate(&a, &b);

    let pairs = problem
        .cells
        .iter()
        .zip(&problem.flow)
        .filter(|(_, &f)| f > 0.0)
        .map(|(&(i, j), &f)| (xs[i].clone(), ys[j].clone(), f))
        .collect();
    let coupling = Coupling::new(pairs)?;
    let distance = if primal >= -1e-12 { primal.max(0.0).sqrt() } else { f64::NAN };
    Ok(W2Solution { distance, coupling, certificate: Certificate { cost: primal, dual_gap, iterations } })
}

struct Transportation {
    m: usize,
    n: usize,
    cost: Vec<Vec<f64>>,
    cells: Vec<(usize, usize)>,
    flow: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl Transportation {
    fn northwest_corner(a: &[f64], b: &[f64], cost: Vec<Vec<f64>>) -> Self {
        let (m, n) = (a.len(), b.len());
        let (mut supply, mut demand) = (a.to_vec(), b.to_vec());
        let (mut i, mut j) = (0, 0);
        let mut cells = Vec::with_capacity(m + n - 1);
        let mut flow = Vec::with_capacity(m + n - 1);
        loop {
            let q = supply[i].min(demand[j]).max(0.0);
            cells.push((i, j));
            flow.push(q);
            if (supply[i] - demand[j]).abs() <= MASS_ROUNDING {
                supply[i] = 0.0;
                demand[j] = 0.0;
            } else {
                supply[i] -= q;
                demand[j] -= q;
            }
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && supply[i] <= demand[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { m, n, cost, cells, flow, u: vec![0.0; m], v: vec![0.0; n] }
    }

    /// Adjacency of the basis tree; nodes `0..m` are rows, `m..m+n` columns.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push(k);
            adj[self.m + j].push(k);
        }
        adj
    }

    fn other_end(&self, k: usize, node: usize) -> usize {
        let (i, j) = self.cells[k];
        if node == i { self.m + j } else { i }
    }

    /// Solves `u_i + v_j = c_ij` on the basis cells.
    fn update_potentials(&mut self, adj: &[Vec<usize>]) {
        let mut seen = vec![false; self.m + self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        self.u[0] = 0.0;
        while let Some(node) = queue.pop_front() {
            for &k in &adj[node] {
                let next = self.other_end(k, node);
                if seen[next] {
                    continue;
                }
                let (i, j) = self.cells[k];
                if next >= self.m {
                    self.v[j] = self.cost[i][j] - self.u[i];
                } else {
                    self.u[i] = self.cost[i][j] - self.v[j];
                }
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }

    /// Basis cells on the tree path from row `i` to column `j`, in order.
    fn tree_path(&self, adj: &[Vec<usize>], i: usize, j: usize) -> Vec<usize> {
        let target = self.m + j;
        let mut parent: Vec<Option<usize>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        let mut queue = VecDeque::from([i]);
        seen[i] = true;
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &k in &adj[node] {
                let next = self.other_end(k, node);
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some(k);
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let k = parent[node].expect("basis is a spanning tree");
            path.push(k);
            node = self.other_end(k, node);
        }
        path.reverse();
        path
    }

    fn solve(&mut self) -> Result<usize> {
        let scale = self.cost.iter().flatten().fold(1.0_f64, |s, &c| s.max(c.abs()));
        let rc_tol = 1e-12 * scale;
        let max_iters = 50 * (self.m + self.n).pow(2) + 1000;
        let mut in_basis = vec![false; self.m * self.n];
        for &(i, j) in &self.cells {
            in_basis[i * self.n + j] = true;
        }
        let mut bland = false;
        for iteration in 0..max_iters {
            let adj = self.adjacency();
            self.update_potentials(&adj);

            let mut entering: Option<(usize, usize, f64)> = None;
            'scan: for i in 0..self.m {
                for j in 0..self.n {
                    if in_basis[i * self.n + j] {
                        continue;
                    }
                    let r = self.cost[i][j] - self.u[i] - self.v[j];
                    if r < -rc_tol && entering.is_none_or(|(_, _, best)| r < best) {
                        entering = Some((i, j, r));
                        if bland {
                            break 'scan;
                        }
                    }
                }
            }
            let Some((ei, ej, _)) = entering else {
                return Ok(iteration);
            };

            let path = self.tree_path(&adj, ei, ej);
            let leaving = path
                .iter()
                .step_by(2)
                .copied()
                .min_by(|&p, &q| self.flow[p].total_cmp(&self.flow[q]).then(self.cells[p].cmp(&self.cells[q])))
                .expect("cycle has a decreasing cell");
            let theta = self.flow[leaving];
            for (pos, &k) in path.iter().enumerate() {
                if pos % 2 == 0 {
                    let left = self.flow[k] - theta;
                    self.flow[k] = if left <= MASS_ROUNDING { 0.0 } else { left };
                } else {
                    self.flow[k] += theta;
                }
            }
            let (li, lj) = self.cells[leaving];
            in_basis[li * self.n + lj] = false;
            in_basis[ei * self.n + ej] = true;
            self.cells[leaving] = (ei, ej);
            self.flow[leaving] = theta;
            bland = theta <= DEGENERATE_STEP;
        }
        Err(Error::NonConvergence { iterations: max_iters, grad_norm: f64::NAN })
    }

    /// Primal cost and the gap to the dual solution `(u, v')` with
    /// `v'_j = min_i (c_ij - u_i)`, which is feasible by construction.
    fn certificate(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let primal: f64 = self.cells.iter().zip(&self.flow).map(|(&(i, j), f)| f * self.cost[i][j]).sum();
        let v: Vec<f64> =
            (0..self.n).map(|j| (0..self.m).map(|i| self.cost[i][j] - self.u[i]).fold(f64::INFINITY, f64::min)).collect();
        let dual: f64 = a.iter().zip(&self.u).map(|(x, y)| x * y).sum::<f64>()
            + b.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        (primal, primal - dual)
    }
}
