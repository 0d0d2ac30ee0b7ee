//! Entropic approximation of W1 with a certified error bound.
//!
//! Log-domain Sinkhorn iterations with a decreasing regularization schedule;
//! the regularization is halved once the marginals have settled.
//! Every few sweeps the current plan is rounded onto the transport polytope
//! (an upper bound on W1) and the dual potentials are c-transformed into a
//! feasible dual point (a lower bound). Iteration stops once the two bounds
//! are within the requested accuracy, so the returned cost is within
//! `epsilon` of the exact value.

use alloc::vec::Vec;

use super::exact::check_cost;
use super::metric::DistanceMatrix;
use super::ProbabilityMeasure;
use crate::error::{Error, Result};

/// Sweep cap for a single call.
pub const MAX_ITERATIONS: usize = 200_000;

/// Approximate W1 between `mu` and `nu`, within `epsilon` of the optimum.
pub fn wasserstein1_sinkhorn(
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
    cost: &DistanceMatrix,
    epsilon: f64,
) -> Result<f64> {
    check_cost(mu, nu, cost)?;
    let a: Vec<f64> = mu.masses().collect();
    let b: Vec<f64> = nu.masses().collect();
    sinkhorn_cost(&a, &b, cost, epsilon)
}

/// Balanced transportation cost within `epsilon`, on raw mass vectors.
pub fn sinkhorn_cost(a: &[f64], b: &[f64], cost: &DistanceMatrix, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("sinkhorn epsilon must be positive"));
    }
    let rows: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let cols: Vec<usize> = (0..b.len()).filter(|&j| b[j] > 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return Ok(0.0);
    }
    if rows.len() == 1 || cols.len() == 1 {
        // A single source or sink admits exactly one plan.
        let mut total = 0.0;
        for &i in &rows {
            for &j in &cols {
                let mass = if rows.len() == 1 { b[j] } else { a[i] };
                total += mass * cost.get(i, j);
            }
        }
        return Ok(total);
    }
    let scale = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
        .map(|(i, j)| cost.get(i, j))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let asub: Vec<f64> = rows.iter().map(|&i| a[i]).collect();
    let bsub: Vec<f64> = cols.iter().map(|&j| b[j]).collect();
    let c = DistanceMatrix::from_fn(rows.len(), cols.len(), |i, j| cost.get(rows[i], cols[j]) / scale);
    let target = epsilon / scale;
    let mut solver = LogSinkhorn::new(&asub, &bsub, &c);
    solver.run(target).map(|upper| upper * scale).map_err(|e| match e {
        Error::SinkhornNotConverged { iterations, best_cost, gap } => Error::SinkhornNotConverged {
            iterations,
            best_cost: best_cost * scale,
            gap: gap * scale,
        },
        other => other,
    })
}

struct LogSinkhorn<'c> {
    a: &'c [f64],
    b: &'c [f64],
    log_a: Vec<f64>,
    log_b: Vec<f64>,
    c: &'c DistanceMatrix,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(values.map(|v| libm::exp(v - max)).sum::<f64>())
}

impl<'c> LogSinkhorn<'c> {
    fn new(a: &'c [f64], b: &'c [f64], c: &'c DistanceMatrix) -> Self {
        Self {
            a,
            b,
            log_a: a.iter().map(|&x| libm::log(x)).collect(),
            log_b: b.iter().map(|&x| libm::log(x)).collect(),
            c,
            f: alloc::vec![0.0; a.len()],
            g: alloc::vec![0.0; b.len()],
        }
    }

    fn sweep(&mut self, reg: f64) {
        let (m, n) = (self.a.len(), self.b.len());
        for i in 0..m {
            let row = self.c.row(i);
            let g = &self.g;
            let lse = log_sum_exp((0..n).map(|j| (g[j] - row[j]) / reg));
            self.f[i] = reg * (self.log_a[i] - lse);
        }
        for j in 0..n {
            let f = &self.f;
            let c = self.c;
            let lse = log_sum_exp((0..m).map(|i| (f[i] - c.get(i, j)) / reg));
            self.g[j] = reg * (self.log_b[j] - lse);
        }
    }

    /// L1 violation of the row marginals; columns are exact after a sweep.
    fn row_error(&self, reg: f64) -> f64 {
        let n = self.b.len();
        (0..self.a.len())
            .map(|i| {
                let row = self.c.row(i);
                let r: f64 = (0..n).map(|j| libm::exp((self.f[i] + self.g[j] - row[j]) / reg)).sum();
                (r - self.a[i]).abs()
            })
            .sum()
    }

    /// Upper bound: cost of the current plan rounded onto the polytope.
    fn rounded_cost(&self, reg: f64) -> f64 {
        let (m, n) = (self.a.len(), self.b.len());
        let mut plan: Vec<f64> = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                plan.push(libm::exp((self.f[i] + self.g[j] - self.c.get(i, j)) / reg));
            }
        }
        for i in 0..m {
            let r: f64 = plan[i * n..(i + 1) * n].iter().sum();
            if r > self.a[i] {
                let s = self.a[i] / r;
                plan[i * n..(i + 1) * n].iter_mut().for_each(|x| *x *= s);
            }
        }
        for j in 0..n {
            let col: f64 = (0..m).map(|i| plan[i * n + j]).sum();
            if col > self.b[j] {
                let s = self.b[j] / col;
                (0..m).for_each(|i| plan[i * n + j] *= s);
            }
        }
        let err_r: Vec<f64> =
            (0..m).map(|i| (self.a[i] - plan[i * n..(i + 1) * n].iter().sum::<f64>()).max(0.0)).collect();
        let err_c: Vec<f64> =
            (0..n).map(|j| (self.b[j] - (0..m).map(|i| plan[i * n + j]).sum::<f64>()).max(0.0)).collect();
        let norm: f64 = err_r.iter().sum();
        let mut total = 0.0;
        for i in 0..m {
            for j in 0..n {
                let mut x = plan[i * n + j];
                if norm > 0.0 {
                    x += err_r[i] * err_c[j] / norm;
                }
                total += x * self.c.get(i, j);
            }
        }
        total
    }

    /// Lower bound: dual objective after a double c-transform of `f`.
    fn dual_bound(&self) -> f64 {
        let (m, n) = (self.a.len(), self.b.len());
        let g: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| self.c.get(i, j) - self.f[i]).fold(f64::INFINITY, f64::min))
            .collect();
        let f: Vec<f64> = (0..m)
            .map(|i| (0..n).map(|j| self.c.get(i, j) - g[j]).fold(f64::INFINITY, f64::min))
            .collect();
        let fa: f64 = f.iter().zip(self.a).map(|(x, w)| x * w).sum();
        let gb: f64 = g.iter().zip(self.b).map(|(x, w)| x * w).sum();
        fa + gb
    }

    fn run(&mut self, target: f64) -> Result<f64> {
        let (m, n) = (self.a.len(), self.b.len());
        let floor = target / (4.0 * libm::log((m * n) as f64).max(1.0));
        let mut reg: f64 = 1.0;
        let mut best_upper = f64::INFINITY;
        let mut best_lower = f64::NEG_INFINITY;
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            for _ in 0..10 {
                self.sweep(reg);
            }
            iterations += 10;
            best_upper = best_upper.min(self.rounded_cost(reg));
            best_lower = best_lower.max(self.dual_bound());
            if best_upper - best_lower <= target {
                return Ok(best_upper);
            }
            // costs are scaled to at most 1, so this bounds the rounding loss
            if reg > floor && self.row_error(reg) <= 0.25 * target {
                reg = (reg * 0.5).max(floor);
            }
        }
        Err(Error::SinkhornNotConverged { iterations, best_cost: best_upper, gap: best_upper - best_lower })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identical_point_masses() {
        let mu = ProbabilityMeasure::point(3);
        let w = wasserstein1_sinkhorn(&mu, &mu, &DistanceMatrix::new(1, 1, vec![0.0]), 0.01).unwrap();
        assert!(w.abs() <= 0.01);
    }

    #[test]
    fn two_by_two_within_epsilon() {
        let mu = ProbabilityMeasure::new(vec![(0, 0.5), (1, 0.5)]).unwrap();
        let nu = ProbabilityMeasure::new(vec![(2, 0.5), (3, 0.5)]).unwrap();
        let cost = DistanceMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]);
        let w = wasserstein1_sinkhorn(&mu, &nu, &cost, 0.01).unwrap();
        assert!((w - 1.0).abs() <= 0.01, "{w}");
    }

    #[test]
    fn rejects_bad_epsilon() {
        let mu = ProbabilityMeasure::point(0);
        let c = DistanceMatrix::new(1, 1, vec![1.0]);
        assert!(wasserstein1_sinkhorn(&mu, &mu, &c, 0.0).is_err());
    }
}
