//! Hypergraph representation, validation, stars and the dual hypergraph.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// A problem found while validating raw hypergraph data.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Hyperedge with fewer than two distinct nodes.
    EdgeTooSmall { edge: EdgeId, size: usize },
    /// Hyperedge references a node id that is not below the node count.
    NodeOutOfRange { edge: EdgeId, node: NodeId },
    /// Weight that is zero, negative, or not finite.
    BadWeight { edge: EdgeId, weight: f64 },
    /// Weight vector does not have one entry per hyperedge.
    WeightCount { edges: usize, weights: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeTooSmall { edge, size } => {
                write!(f, "edge {edge} has {size} distinct node(s), need at least 2")
            }
            Violation::NodeOutOfRange { edge, node } => {
                write!(f, "edge {edge} references node {node} beyond the node count")
            }
            Violation::BadWeight { edge, weight } => {
                write!(f, "edge {edge} has non-positive or non-finite weight {weight}")
            }
            Violation::WeightCount { edges, weights } => {
                write!(f, "{weights} weights given for {edges} edges")
            }
        }
    }
}

/// Checks raw hypergraph data against the [`Hypergraph`] invariants.
///
/// Edges are deduplicated before the size check, so `[1, 1]` counts as a
/// size-1 edge. Duplicate hyperedges are allowed.
pub fn validate(num_nodes: usize, edges: &[Vec<NodeId>], weights: Option<&[f64]>) -> Vec<Violation> {
    let mut out = Vec::new();
    for (idx, edge) in edges.iter().enumerate() {
        let mut sorted = edge.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 2 {
            out.push(Violation::EdgeTooSmall { edge: idx, size: sorted.len() });
        }
        for &node in &sorted {
            if node >= num_nodes {
                out.push(Violation::NodeOutOfRange { edge: idx, node });
            }
        }
    }
    if let Some(weights) = weights {
        if weights.len() != edges.len() {
            out.push(Violation::WeightCount { edges: edges.len(), weights: weights.len() });
        }
        for (idx, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                out.push(Violation::BadWeight { edge: idx, weight: w });
            }
        }
    }
    out
}

/// An undirected hypergraph on dense node ids `0..n`.
///
/// Hyperedges are stored as sorted, deduplicated node lists of size at least
/// two. Each hyperedge carries a strictly positive dissimilarity weight.
/// The star of every node is precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    num_nodes: usize,
    edges: Vec<Vec<NodeId>>,
    weights: Vec<f64>,
    stars: Vec<Vec<EdgeId>>,
}

impl Hypergraph {
    /// Builds a hypergraph with unit weights.
    pub fn new(num_nodes: usize, edges: Vec<Vec<NodeId>>) -> Result<Self> {
        let weights = alloc::vec![1.0; edges.len()];
        Self::with_weights(num_nodes, edges, weights)
    }

    pub fn with_weights(num_nodes: usize, edges: Vec<Vec<NodeId>>, weights: Vec<f64>) -> Result<Self> {
        let violations = validate(num_nodes, &edges, Some(&weights));
        if !violations.is_empty() {
            return Err(Error::InvalidHypergraph(violations));
        }
        let edges = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e.dedup();
                e
            })
            .collect();
        Ok(Self::assemble(num_nodes, edges, weights))
    }

    /// Builds a hypergraph, dropping hyperedges with fewer than two distinct
    /// nodes instead of failing. Returns the indices of the dropped inputs.
    ///
    /// Out-of-range nodes and bad weights are still errors.
    pub fn new_dropping_small(
        num_nodes: usize,
        edges: Vec<Vec<NodeId>>,
        weights: Vec<f64>,
    ) -> Result<(Self, Vec<usize>)> {
        let mut kept = Vec::with_capacity(edges.len());
        let mut kept_w = Vec::with_capacity(edges.len());
        let mut dropped = Vec::new();
        if weights.len() != edges.len() {
            return Err(Error::InvalidHypergraph(alloc::vec![Violation::WeightCount {
                edges: edges.len(),
                weights: weights.len(),
            }]));
        }
        for (idx, (mut e, w)) in edges.into_iter().zip(weights).enumerate() {
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 {
                dropped.push(idx);
            } else {
                kept.push(e);
                kept_w.push(w);
            }
        }
        Ok((Self::with_weights(num_nodes, kept, kept_w)?, dropped))
    }

    fn assemble(num_nodes: usize, edges: Vec<Vec<NodeId>>, weights: Vec<f64>) -> Self {
        let mut stars = alloc::vec![Vec::new(); num_nodes];
        for (idx, edge) in edges.iter().enumerate() {
            for &v in edge {
                stars[v].push(idx);
            }
        }
        Self { num_nodes, edges, weights, stars }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<NodeId>] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &[NodeId] {
        &self.edges[e]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of hyperedges containing `v`.
    pub fn degree(&self, v: NodeId) -> usize {
        self.stars[v].len()
    }

    /// Edge ids containing `v`, in increasing order.
    pub fn star(&self, v: NodeId) -> Result<&[EdgeId]> {
        self.stars
            .get(v)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange { node: v, num_nodes: self.num_nodes })
    }

    pub(crate) fn star_unchecked(&self, v: NodeId) -> &[EdgeId] {
        &self.stars[v]
    }

    /// True when some hyperedge contains both nodes.
    pub fn adjacent(&self, x: NodeId, y: NodeId) -> bool {
        x != y && count_common(&self.stars[x], &self.stars[y]) > 0
    }

    /// The dual hypergraph: one node per hyperedge and one hyperedge per
    /// original node (its star).
    ///
    /// Stars with fewer than two edges cannot form a hyperedge and are
    /// dropped; their node ids are returned alongside the dual.
    pub fn dual(&self) -> (Hypergraph, Vec<NodeId>) {
        let mut edges = Vec::new();
        let mut dropped = Vec::new();
        for (v, star) in self.stars.iter().enumerate() {
            if star.len() >= 2 {
                edges.push(star.clone());
            } else {
                dropped.push(v);
            }
        }
        let weights = alloc::vec![1.0; edges.len()];
        (Self::assemble(self.edges.len(), edges, weights), dropped)
    }
}

/// Size of the intersection of two sorted id lists.
pub(crate) fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn well_formed_has_no_violations() {
        assert!(validate(3, &[vec![0, 1], vec![1, 2]], None).is_empty());
    }

    #[test]
    fn singleton_out_of_range_edge_reports_both() {
        let v = validate(3, &[vec![5]], None);
        assert_eq!(
            v,
            vec![
                Violation::EdgeTooSmall { edge: 0, size: 1 },
                Violation::NodeOutOfRange { edge: 0, node: 5 }
            ]
        );
    }

    #[test]
    fn duplicate_edges_allowed() {
        assert!(validate(3, &[vec![0, 1], vec![0, 1]], None).is_empty());
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.num_edges(), 2);
        assert_eq!(h.star(0).unwrap(), &[0, 1]);
    }

    #[test]
    fn bad_weights_reported() {
        let v = validate(2, &[vec![0, 1]], Some(&[0.0]));
        assert_eq!(v, vec![Violation::BadWeight { edge: 0, weight: 0.0 }]);
        assert!(Hypergraph::with_weights(2, vec![vec![0, 1]], vec![f64::NAN]).is_err());
    }

    #[test]
    fn repeated_node_collapses_to_small_edge() {
        let v = validate(3, &[vec![1, 1]], None);
        assert_eq!(v, vec![Violation::EdgeTooSmall { edge: 0, size: 1 }]);
    }

    #[test]
    fn star_queries() {
        // a=0, b=1, c=2, d=3, isolated 4
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert_eq!(h.star(2).unwrap(), &[0, 1]);
        assert_eq!(h.star(3).unwrap(), &[1]);
        assert!(h.star(4).unwrap().is_empty());
        assert!(matches!(h.star(5), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn dual_of_path_drops_leaves() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let (d, dropped) = h.dual();
        assert_eq!(d.num_nodes(), 2);
        assert_eq!(d.edges(), &[vec![0, 1]]);
        assert_eq!(dropped, vec![0, 2]);
    }

    #[test]
    fn dual_of_overlapping_triangle() {
        // e0={0,1,2}, e1={2,3,4}, e2={4,5,0}: each node in 1 or 2 edges.
        let h = Hypergraph::new(6, vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]]).unwrap();
        let (d, dropped) = h.dual();
        assert_eq!(d.num_nodes(), 3);
        assert_eq!(d.edges(), &[vec![0, 2], vec![0, 1], vec![1, 2]]);
        assert_eq!(dropped, vec![1, 3, 5]);
    }

    #[test]
    fn dual_of_sunflower_has_one_big_edge() {
        let h = Hypergraph::new(7, vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]]).unwrap();
        let (d, _) = h.dual();
        assert_eq!(d.edges(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn dropping_constructor() {
        let (h, dropped) =
            Hypergraph::new_dropping_small(3, vec![vec![0], vec![0, 1], vec![2, 2]], vec![1.0; 3]).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(dropped, vec![0, 2]);
    }
}
