//! Pairwise node-Ricci and edge-Ricci curvatures and their aggregation onto
//! hyperedges.

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeId};
use crate::transport::{
    edge_measure, edge_measure_reduced, metric_w1, node_measure_checked, node_measure_geodesic, MetricOracle,
    ProbabilityMeasure, Solver,
};

/// Reduction of pairwise values onto a hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Max,
    Average,
}

/// Which star measure edge-Ricci curvature transports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasureVariant {
    /// Whole star, mass proportional to hyperedge weight.
    #[default]
    Standard,
    /// Star without the hyperedges containing the other endpoint.
    Reduced,
}

/// Distance between adjacent nodes used by node-Ricci curvature, both in
/// the neighbor measure and as the normalizing length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborDistance {
    /// Weight of the joining edge.
    #[default]
    Direct,
    /// Shortest-path distance under the current weights.
    Geodesic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureConfig {
    /// Mass kept at the node itself by node measures.
    pub alpha: f64,
    /// Exponent on neighbor distances in node measures.
    pub p: f64,
    pub aggregation: Aggregation,
    pub solver: Solver,
    pub measure: MeasureVariant,
    pub neighbor_distance: NeighborDistance,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            p: 1.0,
            aggregation: Aggregation::Max,
            solver: Solver::Exact,
            measure: MeasureVariant::Standard,
            neighbor_distance: NeighborDistance::Direct,
        }
    }
}

impl CurvatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter("alpha must lie in [0, 1]"));
        }
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter("p must be finite and nonnegative"));
        }
        if let Solver::Sinkhorn(eps) = self.solver {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::InvalidParameter("sinkhorn epsilon must be positive"));
            }
        }
        Ok(())
    }
}

/// Maximum or mean of a nonempty list. The mean uses pairwise summation so
/// the result does not depend on how the list was produced beyond its order.
pub fn aggregate(values: &[f64], agg: Aggregation) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    Ok(match agg {
        Aggregation::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Aggregation::Average => pairwise_sum(values) / values.len() as f64,
    })
}

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Node-Ricci curvature `1 - W(nu_x, nu_y) / d(x, y)` on the oracle's graph,
/// where `d(x, y)` is the weight of the edge joining `x` and `y`.
pub fn node_ricci_pair(oracle: &MetricOracle, x: NodeId, y: NodeId, cfg: &CurvatureConfig) -> Result<f64> {
    let graph = oracle.graph();
    if x >= graph.num_nodes() || y >= graph.num_nodes() {
        return Err(Error::NodeOutOfRange { node: x.max(y), num_nodes: graph.num_nodes() });
    }
    let edge = graph.edge_index(x, y).ok_or(Error::NotAdjacent(x, y))?;
    let nu_x = neighbor_measure(oracle, x, cfg)?.0;
    let nu_y = neighbor_measure(oracle, y, cfg)?.0;
    let length = match cfg.neighbor_distance {
        NeighborDistance::Direct => graph.weight(edge),
        NeighborDistance::Geodesic => oracle.distance(x, y),
    };
    node_ricci_from_measures(oracle, &nu_x, &nu_y, length, cfg.solver)
}

/// Node measure of `x` under the configured neighbor distance; the flag
/// reports a fallback to uniform neighbor mass.
pub fn neighbor_measure(oracle: &MetricOracle, x: NodeId, cfg: &CurvatureConfig) -> Result<(ProbabilityMeasure, bool)> {
    match cfg.neighbor_distance {
        NeighborDistance::Direct => node_measure_checked(oracle.graph(), x, cfg.alpha, cfg.p),
        NeighborDistance::Geodesic => node_measure_geodesic(oracle, x, cfg.alpha, cfg.p),
    }
}

pub(crate) fn node_ricci_from_measures(
    oracle: &MetricOracle,
    nu_x: &ProbabilityMeasure,
    nu_y: &ProbabilityMeasure,
    edge_weight: f64,
    solver: Solver,
) -> Result<f64> {
    let w = metric_w1(nu_x, nu_y, oracle, solver)?;
    Ok(1.0 - w / edge_weight)
}

/// Edge-Ricci curvature `1 - W(mu_x, mu_y) / D`, with `D` the largest
/// current weight among hyperedges containing both nodes and `W` measured
/// on the line graph behind `line_oracle`.
///
/// With [`MeasureVariant::Reduced`], an empty reduced star on either side
/// means nothing has to move and the curvature is 1.
pub fn edge_ricci_pair(
    h: &Hypergraph,
    weights: &[f64],
    line_oracle: &MetricOracle,
    x: NodeId,
    y: NodeId,
    cfg: &CurvatureConfig,
) -> Result<f64> {
    let sx = h.star(x)?;
    let sy = h.star(y)?;
    let shared_max = shared_max_weight(sx, sy, weights).ok_or(Error::NotAdjacent(x, y))?;
    let (mu_x, mu_y) = match cfg.measure {
        MeasureVariant::Standard => (edge_measure(h, weights, x)?, edge_measure(h, weights, y)?),
        MeasureVariant::Reduced => {
            match (edge_measure_reduced(h, weights, x, y), edge_measure_reduced(h, weights, y, x)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(Error::ReducedStarEmpty { .. }), _) | (_, Err(Error::ReducedStarEmpty { .. })) => {
                    return Ok(1.0)
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
    };
    let w = metric_w1(&mu_x, &mu_y, line_oracle, cfg.solver)?;
    Ok(1.0 - w / shared_max)
}

/// Largest weight over the intersection of two sorted stars.
pub(crate) fn shared_max_weight(a: &[usize], b: &[usize], weights: &[f64]) -> Option<f64> {
    let (mut i, mut j) = (0, 0);
    let mut best: Option<f64> = None;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                let w = weights[a[i]];
                best = Some(best.map_or(w, |m: f64| m.max(w)));
                i += 1;
                j += 1;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{line_expansion, WeightedGraph, WeightingScheme};
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn aggregate_examples() {
        let v = [0.2, -0.5, 1.0];
        assert_eq!(aggregate(&v, Aggregation::Max), Ok(1.0));
        assert_abs_diff_eq!(aggregate(&v, Aggregation::Average).unwrap(), 0.7 / 3.0, epsilon = 1e-15);
        assert_eq!(aggregate(&[4.5], Aggregation::Max), Ok(4.5));
        assert_eq!(aggregate(&[4.5], Aggregation::Average), Ok(4.5));
        assert_eq!(aggregate(&[], Aggregation::Max), Err(Error::EmptyAggregate));
    }

    #[test]
    fn node_ricci_requires_adjacency() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0)]);
        let oracle = MetricOracle::new(g);
        assert_eq!(
            node_ricci_pair(&oracle, 0, 2, &CurvatureConfig::default()),
            Err(Error::NotAdjacent(0, 2))
        );
    }

    #[test]
    fn single_edge_graph_is_flat() {
        let g = WeightedGraph::from_edges(2, vec![(0, 1, 2.5)]);
        let oracle = MetricOracle::new(g);
        let cfg = CurvatureConfig { alpha: 0.0, p: 0.0, ..Default::default() };
        assert_abs_diff_eq!(node_ricci_pair(&oracle, 0, 1, &cfg).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn alpha_one_gives_zero_on_shortest_edges() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]);
        let oracle = MetricOracle::new(g);
        let cfg = CurvatureConfig { alpha: 1.0, ..Default::default() };
        assert_abs_diff_eq!(node_ricci_pair(&oracle, 0, 1, &cfg).unwrap(), 0.0);
        // Direct edge of weight 3 is not a shortest path (length 2).
        assert_abs_diff_eq!(node_ricci_pair(&oracle, 0, 2, &cfg).unwrap(), 1.0 - 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn all_mass_retained_gives_flat_twins() {
        // Twins with identical closed neighborhoods: measures coincide when
        // alpha equals the uniform share 1 / (deg + 1).
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        let oracle = MetricOracle::new(g);
        let cfg = CurvatureConfig { alpha: 1.0 / 3.0, p: 0.0, ..Default::default() };
        assert_abs_diff_eq!(node_ricci_pair(&oracle, 0, 1, &cfg).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bridge_between_cliques_is_negative() {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((base + i, base + j, 1.0));
                }
            }
        }
        edges.push((0, 5, 1.0));
        let oracle = MetricOracle::new(WeightedGraph::from_edges(10, edges));
        let cfg = CurvatureConfig { alpha: 0.5, p: 0.0, ..Default::default() };
        let bridge = node_ricci_pair(&oracle, 0, 5, &cfg).unwrap();
        let inner = node_ricci_pair(&oracle, 1, 2, &cfg).unwrap();
        let gate = node_ricci_pair(&oracle, 0, 1, &cfg).unwrap();
        assert!(bridge < 0.0, "{bridge}");
        assert!(inner > 0.0 && gate > 0.0, "{inner} {gate}");
    }

    #[test]
    fn coinciding_stars_are_flat() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2], vec![0, 1]]).unwrap();
        let oracle = MetricOracle::new(line_expansion(&h, WeightingScheme::Uniform));
        let k = edge_ricci_pair(&h, &[1.0, 1.0], &oracle, 0, 1, &CurvatureConfig::default()).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn reduced_empty_star_convention() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let oracle = MetricOracle::new(line_expansion(&h, WeightingScheme::Uniform));
        let cfg = CurvatureConfig { measure: MeasureVariant::Reduced, ..Default::default() };
        assert_eq!(edge_ricci_pair(&h, &[1.0, 1.0], &oracle, 0, 1, &cfg), Ok(1.0));
        assert_eq!(
            edge_ricci_pair(&h, &[1.0, 1.0], &oracle, 0, 2, &cfg),
            Err(Error::NotAdjacent(0, 2))
        );
    }

    #[test]
    fn shared_max_uses_heaviest_common_edge() {
        assert_eq!(shared_max_weight(&[0, 2, 3], &[2, 3, 5], &[9.0, 9.0, 1.5, 2.5, 0.0, 9.0]), Some(2.5));
        assert_eq!(shared_max_weight(&[0], &[1], &[1.0, 1.0]), None);
    }
}
