//! Exact Wasserstein-1 distance via the transportation simplex.
//!
//! The basis is a spanning tree on the bipartite row/column graph. It is
//! seeded by the matrix-minimum rule and improved by block pricing. After
//! each pivot only the subtree cut off by the leaving cell is re-hung and
//! has its potentials refreshed. After a long run of pivots the solver
//! switches to Bland's rule, which cannot cycle.

use alloc::vec::Vec;

use super::metric::DistanceMatrix;
use super::ProbabilityMeasure;
use crate::error::{Error, Result};

/// Optimal coupling between two measures.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(source id, target id, mass)` with positive mass.
    pub entries: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

impl TransportPlan {
    /// Largest deviation of the plan's marginals from `mu` and `nu`.
    pub fn marginal_error(&self, mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> f64 {
        let mut row = alloc::collections::BTreeMap::new();
        let mut col = alloc::collections::BTreeMap::new();
        for &(s, t, x) in &self.entries {
            *row.entry(s).or_insert(0.0) += x;
            *col.entry(t).or_insert(0.0) += x;
        }
        let mut err: f64 = 0.0;
        for &(id, m) in mu.support() {
            err = err.max((row.remove(&id).unwrap_or(0.0) - m).abs());
        }
        for &(id, m) in nu.support() {
            err = err.max((col.remove(&id).unwrap_or(0.0) - m).abs());
        }
        // mass sent from or to ids outside the supports
        for x in row.values().chain(col.values()) {
            err = err.max(x.abs());
        }
        err
    }
}

/// Exact W1 between `mu` and `nu`. `cost` has one row per support point of
/// `mu` and one column per support point of `nu`, both in support order.
pub fn wasserstein1_exact(
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
    cost: &DistanceMatrix,
) -> Result<TransportPlan> {
    check_cost(mu, nu, cost)?;
    let supply: Vec<f64> = mu.masses().collect();
    let demand: Vec<f64> = nu.masses().collect();
    let cells = transport_simplex(&supply, &demand, cost);
    let mu_ids: Vec<usize> = mu.ids().collect();
    let nu_ids: Vec<usize> = nu.ids().collect();
    let mut total = 0.0;
    let entries = cells
        .into_iter()
        .map(|(i, j, x)| {
            total += x * cost.get(i, j);
            (mu_ids[i], nu_ids[j], x)
        })
        .collect();
    Ok(TransportPlan { entries, cost: total })
}

pub(crate) fn check_cost(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, cost: &DistanceMatrix) -> Result<()> {
    if cost.rows() != mu.len() || cost.cols() != nu.len() {
        return Err(Error::CostShape {
            rows: cost.rows(),
            cols: cost.cols(),
            expected_rows: mu.len(),
            expected_cols: nu.len(),
        });
    }
    if cost.as_slice().iter().any(|c| !c.is_finite()) {
        return Err(Error::DisconnectedSupports);
    }
    Ok(())
}

/// Optimal cost of a balanced transportation problem given finite costs.
pub fn transport_cost(supply: &[f64], demand: &[f64], cost: &DistanceMatrix) -> f64 {
    transport_simplex(supply, demand, cost)
        .into_iter()
        .map(|(i, j, x)| x * cost.get(i, j))
        .sum()
}

/// Solves the transportation problem and returns the positive cells of an
/// optimal plan as `(row, col, mass)`.
///
/// Supplies and demands must be nonnegative with (nearly) equal totals.
pub fn transport_simplex(supply: &[f64], demand: &[f64], cost: &DistanceMatrix) -> Vec<(usize, usize, f64)> {
    assert_eq!(cost.rows(), supply.len());
    assert_eq!(cost.cols(), demand.len());
    let rows: Vec<usize> = (0..supply.len()).filter(|&i| supply[i] > 0.0).collect();
    let cols: Vec<usize> = (0..demand.len()).filter(|&j| demand[j] > 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return Vec::new();
    }
    if rows.len() == 1 {
        return cols.iter().map(|&j| (rows[0], j, demand[j])).collect();
    }
    if cols.len() == 1 {
        return rows.iter().map(|&i| (i, cols[0], supply[i])).collect();
    }
    let a: Vec<f64> = rows.iter().map(|&i| supply[i]).collect();
    let b: Vec<f64> = cols.iter().map(|&j| demand[j]).collect();
    let c = DistanceMatrix::from_fn(rows.len(), cols.len(), |i, j| cost.get(rows[i], cols[j]));
    let mut solver = Simplex::new(&a, &b, &c);
    solver.solve();
    solver
        .basis
        .iter()
        .zip(&solver.flow)
        .filter(|(_, &x)| x > 0.0)
        .map(|(&(i, j), &x)| (rows[i], cols[j], x))
        .collect()
}

const NONE: usize = usize::MAX;

struct Simplex<'c> {
    m: usize,
    n: usize,
    cost: &'c DistanceMatrix,
    basis: Vec<(usize, usize)>,
    flow: Vec<f64>,
    /// Basis slot + 1 for each cell, 0 when non-basic.
    slot: Vec<u32>,
    /// Incident basis slots per tree node (rows first, then columns).
    adj: Vec<Vec<usize>>,
    potential: Vec<f64>,
    parent_node: Vec<usize>,
    parent_slot: Vec<usize>,
    depth: Vec<usize>,
    queue: Vec<usize>,
    tolerance: f64,
    next_cell: usize,
}

impl<'c> Simplex<'c> {
    fn new(a: &[f64], b: &[f64], cost: &'c DistanceMatrix) -> Self {
        let (m, n) = (a.len(), b.len());
        let mut s = Self {
            m,
            n,
            cost,
            basis: Vec::with_capacity(m + n - 1),
            flow: Vec::with_capacity(m + n - 1),
            slot: alloc::vec![0; m * n],
            adj: alloc::vec![Vec::new(); m + n],
            potential: alloc::vec![0.0; m + n],
            parent_node: alloc::vec![NONE; m + n],
            parent_slot: alloc::vec![NONE; m + n],
            depth: alloc::vec![0; m + n],
            queue: Vec::with_capacity(m + n),
            tolerance: 1e-12 * cost.max().max(f64::MIN_POSITIVE),
            next_cell: 0,
        };
        s.initial_basis(a, b);
        s
    }

    /// Matrix-minimum rule: every allocation retires exactly one row or
    /// column (the last retires both), giving `m + n - 1` tree cells.
    fn initial_basis(&mut self, a: &[f64], b: &[f64]) {
        let (m, n) = (self.m, self.n);
        let mut order: Vec<usize> = (0..m * n).collect();
        let c = self.cost.as_slice();
        order.sort_by(|&x, &y| c[x].total_cmp(&c[y]).then(x.cmp(&y)));
        let mut s = a.to_vec();
        let mut d = b.to_vec();
        let mut row_open = alloc::vec![true; m];
        let mut col_open = alloc::vec![true; n];
        let (mut rows_left, mut cols_left) = (m, n);
        for cell in order {
            let (i, j) = (cell / n, cell % n);
            if !row_open[i] || !col_open[j] {
                continue;
            }
            let row_done = s[i] <= d[j];
            let x = if row_done { s[i] } else { d[j] };
            self.push_cell(i, j, x);
            if rows_left == 1 && cols_left == 1 {
                break;
            }
            let retire_row = if rows_left == 1 {
                false
            } else if cols_left == 1 {
                true
            } else {
                row_done
            };
            if retire_row {
                s[i] = 0.0;
                d[j] = (d[j] - x).max(0.0);
                row_open[i] = false;
                rows_left -= 1;
            } else {
                d[j] = 0.0;
                s[i] = (s[i] - x).max(0.0);
                col_open[j] = false;
                cols_left -= 1;
            }
        }
        debug_assert_eq!(self.basis.len(), m + n - 1);
    }

    fn push_cell(&mut self, i: usize, j: usize, x: f64) {
        let k = self.basis.len();
        self.basis.push((i, j));
        self.flow.push(x);
        self.slot[i * self.n + j] = k as u32 + 1;
        self.adj[i].push(k);
        self.adj[self.m + j].push(k);
    }

    /// Potentials `u_i + v_j = c_ij` on basic cells, rooted at row 0.
    fn compute_potentials(&mut self) {
        let m = self.m;
        self.parent_node.iter_mut().for_each(|p| *p = NONE);
        self.queue.clear();
        self.queue.push(0);
        self.potential[0] = 0.0;
        self.depth[0] = 0;
        self.parent_node[0] = 0;
        let mut head = 0;
        while head < self.queue.len() {
            let node = self.queue[head];
            head += 1;
            for idx in 0..self.adj[node].len() {
                let k = self.adj[node][idx];
                let (i, j) = self.basis[k];
                let other = if node < m { m + j } else { i };
                if self.parent_node[other] != NONE {
                    continue;
                }
                let c = self.cost.get(i, j);
                self.potential[other] = c - self.potential[node];
                self.parent_node[other] = node;
                self.parent_slot[other] = k;
                self.depth[other] = self.depth[node] + 1;
                self.queue.push(other);
            }
        }
        debug_assert_eq!(self.queue.len(), m + self.n, "basis is not a spanning tree");
    }

    #[inline]
    fn reduced_cost(&self, cell: usize) -> f64 {
        let (i, j) = (cell / self.n, cell % self.n);
        self.cost.get(i, j) - self.potential[i] - self.potential[self.m + j]
    }

    /// Block search: the most negative reduced cost within the first block
    /// that contains any negative one.
    fn price_block(&mut self) -> Option<usize> {
        let (m, n) = (self.m, self.n);
        let total = m * n;
        let block = (libm::sqrt(total as f64) as usize).max(8);
        let costs = self.cost.as_slice();
        let (u, v) = self.potential.split_at(m);
        let mut best = NONE;
        let mut best_val = -self.tolerance;
        let mut scanned = 0;
        let mut cell = self.next_cell;
        let (mut i, mut j) = (cell / n, cell % n);
        while scanned < total {
            if self.slot[cell] == 0 {
                let r = costs[cell] - u[i] - v[j];
                if r < best_val {
                    best_val = r;
                    best = cell;
                }
            }
            scanned += 1;
            cell += 1;
            j += 1;
            if j == n {
                j = 0;
                i += 1;
                if cell == total {
                    cell = 0;
                    i = 0;
                }
            }
            if scanned % block == 0 && best != NONE {
                break;
            }
        }
        self.next_cell = cell;
        (best != NONE).then_some(best)
    }

    /// Bland's rule: the lowest-index cell with negative reduced cost.
    fn price_bland(&self) -> Option<usize> {
        (0..self.m * self.n).find(|&cell| self.slot[cell] == 0 && self.reduced_cost(cell) < -self.tolerance)
    }

    fn solve(&mut self) {
        let size = self.m + self.n;
        let bland_after = 50 * size * size + 1000;
        let mut iterations = 0usize;
        let mut path_row = Vec::new();
        let mut path_col = Vec::new();
        self.compute_potentials();
        loop {
            let bland = iterations > bland_after;
            let entering = if bland { self.price_bland() } else { self.price_block() };
            let Some(cell) = entering else { break };
            iterations += 1;
            let (ei, ej) = (cell / self.n, cell % self.n);

            // Tree path between the entering cell's column and row.
            path_row.clear();
            path_col.clear();
            let (mut a, mut b) = (ei, self.m + ej);
            while a != b {
                if self.depth[a] >= self.depth[b] {
                    path_row.push(self.parent_slot[a]);
                    a = self.parent_node[a];
                } else {
                    path_col.push(self.parent_slot[b]);
                    b = self.parent_node[b];
                }
            }
            // Cycle order after the entering cell: column side upward, then
            // row side downward. Even positions lose flow.
            let cycle_len = path_col.len() + path_row.len();
            let at = |pos: usize| -> usize {
                if pos < path_col.len() {
                    path_col[pos]
                } else {
                    path_row[cycle_len - 1 - pos]
                }
            };
            let mut leave_pos = NONE;
            let mut theta = f64::INFINITY;
            for pos in (0..cycle_len).step_by(2) {
                let k = at(pos);
                let x = self.flow[k];
                let better = x < theta
                    || (bland && x == theta && {
                        let (i, j) = self.basis[k];
                        let (li, lj) = self.basis[at(leave_pos)];
                        i * self.n + j < li * self.n + lj
                    });
                if better {
                    theta = x;
                    leave_pos = pos;
                }
            }
            for pos in 0..cycle_len {
                let k = at(pos);
                if pos % 2 == 0 {
                    self.flow[k] -= theta;
                } else {
                    self.flow[k] += theta;
                }
            }
            let leave = at(leave_pos);
            let (li, lj) = self.basis[leave];
            self.slot[li * self.n + lj] = 0;
            let m = self.m;
            self.adj[li].retain(|&k| k != leave);
            self.adj[m + lj].retain(|&k| k != leave);
            self.basis[leave] = (ei, ej);
            self.flow[leave] = theta;
            self.slot[cell] = leave as u32 + 1;
            self.adj[ei].push(leave);
            self.adj[m + ej].push(leave);

            // The side of the leaving cell away from the root now hangs off
            // the entering cell.
            let (top, parent) = if leave_pos < path_col.len() { (m + ej, ei) } else { (ei, m + ej) };
            self.reroot(top, parent, leave);
        }
    }

    /// Re-hangs the subtree containing `top` below `parent` through basis
    /// slot `via`, refreshing potentials, parents and depths inside it.
    fn reroot(&mut self, top: usize, parent: usize, via: usize) {
        let m = self.m;
        self.parent_node[top] = parent;
        self.parent_slot[top] = via;
        self.queue.clear();
        self.queue.push(top);
        let mut head = 0;
        while head < self.queue.len() {
            let node = self.queue[head];
            head += 1;
            let up = self.parent_node[node];
            let (i, j) = self.basis[self.parent_slot[node]];
            self.potential[node] = self.cost.get(i, j) - self.potential[up];
            self.depth[node] = self.depth[up] + 1;
            for idx in 0..self.adj[node].len() {
                let k = self.adj[node][idx];
                let (i, j) = self.basis[k];
                let other = if node < m { m + j } else { i };
                if other == up {
                    continue;
                }
                self.parent_node[other] = node;
                self.parent_slot[other] = k;
                self.queue.push(other);
            }
        }
    }
}
