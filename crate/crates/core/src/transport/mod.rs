//! Probability measures, shortest-path metrics and Wasserstein-1 solvers.

mod exact;
mod measure;
mod metric;
mod sinkhorn;

use alloc::vec::Vec;

pub use exact::{transport_cost, transport_simplex, wasserstein1_exact, TransportPlan};
pub use measure::{
    edge_measure, edge_measure_reduced, node_measure, node_measure_checked, node_measure_geodesic, ProbabilityMeasure,
    MASS_TOLERANCE,
};
pub use metric::{dijkstra, DistanceMatrix, MetricOracle};
pub use sinkhorn::{sinkhorn_cost, wasserstein1_sinkhorn};

use crate::error::{Error, Result};

/// Which W1 solver to use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Solver {
    #[default]
    Exact,
    /// Entropic solver accurate to the given absolute error.
    Sinkhorn(f64),
}

/// W1 between two measures under the oracle's shortest-path metric.
///
/// Mass present at the same element in both measures stays in place at zero
/// cost, so only the positive and negative parts of `mu - nu` are
/// transported. For a metric this leaves the optimal cost unchanged and
/// shrinks the problem, often substantially.
pub fn metric_w1(
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
    oracle: &MetricOracle,
    solver: Solver,
) -> Result<f64> {
    let (sources, supply, targets, demand) = split_difference(mu, nu);
    if sources.is_empty() || targets.is_empty() {
        return Ok(0.0);
    }
    let cost = oracle.distances(&sources, &targets);
    if cost.as_slice().iter().any(|c| !c.is_finite()) {
        return Err(Error::DisconnectedSupports);
    }
    match solver {
        Solver::Exact => Ok(transport_cost(&supply, &demand, &cost)),
        Solver::Sinkhorn(eps) => sinkhorn_cost(&supply, &demand, &cost, eps),
    }
}

/// Positive part (sources) and negative part (targets) of `mu - nu`, with
/// the larger side rescaled to the smaller total so the problem balances.
fn split_difference(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> (Vec<usize>, Vec<f64>, Vec<usize>, Vec<f64>) {
    let (a, b) = (mu.support(), nu.support());
    let (mut i, mut j) = (0, 0);
    let mut sources = Vec::new();
    let mut supply = Vec::new();
    let mut targets = Vec::new();
    let mut demand = Vec::new();
    let mut push = |id: usize, diff: f64| {
        if diff > 1e-15 {
            sources.push(id);
            supply.push(diff);
        } else if diff < -1e-15 {
            targets.push(id);
            demand.push(-diff);
        }
    };
    while i < a.len() || j < b.len() {
        let ida = a.get(i).map_or(usize::MAX, |x| x.0);
        let idb = b.get(j).map_or(usize::MAX, |x| x.0);
        if ida < idb {
            push(ida, a[i].1);
            i += 1;
        } else if idb < ida {
            push(idb, -b[j].1);
            j += 1;
        } else {
            push(ida, a[i].1 - b[j].1);
            i += 1;
            j += 1;
        }
    }
    let (sa, sb): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
    if sa > 0.0 && sb > 0.0 {
        if sa > sb {
            let s = sb / sa;
            supply.iter_mut().for_each(|x| *x *= s);
        } else if sb > sa {
            let s = sa / sb;
            demand.iter_mut().for_each(|x| *x *= s);
        }
    }
    (sources, supply, targets, demand)
}
