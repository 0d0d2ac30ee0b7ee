//! Probability measures on node neighborhoods and hyperedge stars.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use super::metric::MetricOracle;
use crate::graph::WeightedGraph;
use crate::hypergraph::{Hypergraph, NodeId};

/// Allowed deviation of the total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Finitely supported probability measure over integer element ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    support: Vec<(usize, f64)>,
}

impl ProbabilityMeasure {
    /// Validates and sorts a list of `(id, mass)` pairs.
    pub fn new(mut support: Vec<(usize, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidMeasure("empty support"));
        }
        if support.iter().any(|&(_, m)| !(m >= 0.0 && m.is_finite())) {
            return Err(Error::InvalidMeasure("masses must be finite and nonnegative"));
        }
        support.sort_by_key(|&(id, _)| id);
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMeasure("duplicate support id"));
        }
        let total: f64 = support.iter().map(|&(_, m)| m).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMeasure("masses do not sum to 1"));
        }
        Ok(Self { support })
    }

    /// Normalizes nonnegative weights into a measure.
    pub fn from_weights(weights: Vec<(usize, f64)>) -> Result<Self> {
        let total: f64 = weights.iter().map(|&(_, w)| w).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMeasure("weights must have a positive finite total"));
        }
        Self::new(weights.into_iter().map(|(id, w)| (id, w / total)).collect())
    }

    pub fn point(id: usize) -> Self {
        Self { support: alloc::vec![(id, 1.0)] }
    }

    /// `(id, mass)` pairs sorted by id.
    pub fn support(&self) -> &[(usize, f64)] {
        &self.support
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().map(|&(id, _)| id)
    }

    pub fn masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.support.iter().map(|&(_, m)| m)
    }

    pub fn mass(&self, id: usize) -> f64 {
        self.support
            .binary_search_by_key(&id, |&(i, _)| i)
            .map(|i| self.support[i].1)
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Node measure: mass `alpha` at `x` and `(1 - alpha) exp(-d^p) / C` on each
/// neighbor, where `d` is the direct edge weight.
///
/// The exponentials are evaluated relative to the nearest neighbor, which
/// leaves the normalized masses unchanged and keeps them from underflowing
/// when weights grow large. Masses that still fall below `1e-300` are
/// flushed to zero. The returned flag is set when every neighbor mass was
/// non-finite and the uniform fallback was used instead.
pub fn node_measure_checked(
    graph: &WeightedGraph,
    x: NodeId,
    alpha: f64,
    p: f64,
) -> Result<(ProbabilityMeasure, bool)> {
    if x >= graph.num_nodes() {
        return Err(Error::NodeOutOfRange { node: x, num_nodes: graph.num_nodes() });
    }
    let neighbors = graph.neighbors(x);
    if neighbors.is_empty() {
        return Err(Error::NoNeighbors(x));
    }
    let distances: Vec<f64> = neighbors.iter().map(|&(_, e)| graph.weight(e)).collect();
    neighbor_measure(x, neighbors, &distances, alpha, p)
}

/// Like [`node_measure_checked`] with the shortest-path distance to each
/// neighbor in place of the direct edge weight.
pub fn node_measure_geodesic(
    oracle: &MetricOracle,
    x: NodeId,
    alpha: f64,
    p: f64,
) -> Result<(ProbabilityMeasure, bool)> {
    let graph = oracle.graph();
    if x >= graph.num_nodes() {
        return Err(Error::NodeOutOfRange { node: x, num_nodes: graph.num_nodes() });
    }
    let neighbors = graph.neighbors(x);
    if neighbors.is_empty() {
        return Err(Error::NoNeighbors(x));
    }
    let row = oracle.distances_from(x);
    let distances: Vec<f64> = neighbors.iter().map(|&(y, _)| row[y]).collect();
    neighbor_measure(x, neighbors, &distances, alpha, p)
}

fn neighbor_measure(
    x: NodeId,
    neighbors: &[(NodeId, usize)],
    distances: &[f64],
    alpha: f64,
    p: f64,
) -> Result<(ProbabilityMeasure, bool)> {
    let exponents: Vec<f64> = distances.iter().map(|&d| libm::pow(d, p)).collect();
    let shift = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    let mut raw: Vec<f64> = exponents
        .iter()
        .map(|&t| {
            let m = libm::exp(-(t - shift));
            if m < 1e-300 {
                0.0
            } else {
                m
            }
        })
        .collect();
    let mut total: f64 = raw.iter().sum();
    let mut fallback = false;
    if !(total > 0.0 && total.is_finite()) {
        raw.iter_mut().for_each(|m| *m = 1.0);
        total = raw.len() as f64;
        fallback = true;
    }
    let mut support = Vec::with_capacity(neighbors.len() + 1);
    if alpha > 0.0 {
        support.push((x, alpha));
    }
    for (&(y, _), &m) in neighbors.iter().zip(&raw) {
        if m > 0.0 {
            support.push((y, (1.0 - alpha) * m / total));
        }
    }
    support.retain(|&(_, m)| m > 0.0);
    Ok((ProbabilityMeasure::new(support)?, fallback))
}

/// See [`node_measure_checked`].
pub fn node_measure(graph: &WeightedGraph, x: NodeId, alpha: f64, p: f64) -> Result<ProbabilityMeasure> {
    node_measure_checked(graph, x, alpha, p).map(|(m, _)| m)
}

/// Star measure: each hyperedge containing `x` gets mass proportional to its
/// current weight.
pub fn edge_measure(h: &Hypergraph, weights: &[f64], x: NodeId) -> Result<ProbabilityMeasure> {
    let star = h.star(x)?;
    if star.is_empty() {
        return Err(Error::EmptyStar(x));
    }
    ProbabilityMeasure::from_weights(star.iter().map(|&e| (e, weights[e])).collect())
}

/// Reduced star measure of `x` relative to `y`: like [`edge_measure`] but
/// restricted to hyperedges that do not contain `y`.
pub fn edge_measure_reduced(
    h: &Hypergraph,
    weights: &[f64],
    x: NodeId,
    y: NodeId,
) -> Result<ProbabilityMeasure> {
    let star = h.star(x)?;
    h.star(y)?;
    let support: Vec<(usize, f64)> = star
        .iter()
        .filter(|&&e| h.edge(e).binary_search(&y).is_err())
        .map(|&e| (e, weights[e]))
        .collect();
    if support.is_empty() {
        return Err(Error::ReducedStarEmpty { x, y });
    }
    ProbabilityMeasure::from_weights(support)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn star_center_even_split() {
        let g = WeightedGraph::from_edges(4, vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        let m = node_measure(&g, 0, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(m.mass(0), 0.5, epsilon = 1e-15);
        for y in 1..4 {
            assert_abs_diff_eq!(m.mass(y), 1.0 / 6.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn alpha_one_is_point_mass() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (0, 2, 2.0)]);
        let m = node_measure(&g, 0, 1.0, 1.0).unwrap();
        assert_eq!(m.support(), &[(0, 1.0)]);
    }

    #[test]
    fn exponential_decay_with_distance() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 1.0), (0, 2, 2.0)]);
        let m = node_measure(&g, 0, 0.0, 1.0).unwrap();
        let e1 = (-1.0f64).exp();
        let e2 = (-2.0f64).exp();
        assert_abs_diff_eq!(m.mass(1), e1 / (e1 + e2), epsilon = 1e-15);
        assert_abs_diff_eq!(m.mass(1), 0.7310585786300049, epsilon = 1e-12);
        assert_abs_diff_eq!(m.mass(2), 0.2689414213699951, epsilon = 1e-12);
    }

    #[test]
    fn huge_weights_do_not_underflow() {
        let g = WeightedGraph::from_edges(3, vec![(0, 1, 2000.0), (0, 2, 2001.0)]);
        let (m, fallback) = node_measure_checked(&g, 0, 0.0, 1.0).unwrap();
        assert!(!fallback);
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(m.mass(1), 1.0 / (1.0 + e), epsilon = 1e-12);
    }

    #[test]
    fn isolated_node_errors() {
        let g = WeightedGraph::from_edges(2, Vec::<(usize, usize, f64)>::new());
        assert_eq!(node_measure(&g, 1, 0.5, 1.0), Err(Error::NoNeighbors(1)));
    }

    #[test]
    fn star_measure_proportional_to_weights() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let m = edge_measure(&h, &[1.0, 3.0], 0).unwrap();
        assert_eq!(m.support(), &[(0, 0.25), (1, 0.75)]);
        let single = edge_measure(&h, &[1.0, 3.0], 1).unwrap();
        assert_eq!(single.support(), &[(0, 1.0)]);
    }

    #[test]
    fn star_measure_uniform() {
        let h = Hypergraph::new(5, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]]).unwrap();
        let m = edge_measure(&h, &[2.0; 4], 0).unwrap();
        assert!(m.masses().all(|x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn reduced_measure_drops_shared_edges() {
        // St(x=0) = {e0 = {0,1}, e1 = {0,2}}, St(y=1) = {e0}
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let m = edge_measure_reduced(&h, &[1.0, 1.0], 0, 1).unwrap();
        assert_eq!(m.support(), &[(1, 1.0)]);
        assert_eq!(
            edge_measure_reduced(&h, &[1.0, 1.0], 1, 0),
            Err(Error::ReducedStarEmpty { x: 1, y: 0 })
        );
    }

    #[test]
    fn measure_validation() {
        assert!(ProbabilityMeasure::new(vec![(0, 0.5), (0, 0.5)]).is_err());
        assert!(ProbabilityMeasure::new(vec![(0, 0.5), (1, 0.4)]).is_err());
        assert!(ProbabilityMeasure::new(vec![(0, -0.5), (1, 1.5)]).is_err());
        assert!(ProbabilityMeasure::new(vec![(1, 0.5), (0, 0.5)]).is_ok());
    }
}
