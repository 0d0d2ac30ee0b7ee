//! Weighted graphs and the clique / line expansions of a hypergraph.

use alloc::vec::Vec;

use crate::hypergraph::{count_common, Hypergraph};

/// Initial weighting of an expansion graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightingScheme {
    /// Every edge has weight 1.
    Uniform,
    /// Inverse Jaccard index of the sets attached to the two endpoints.
    #[default]
    Jaccard,
}

/// Inverse Jaccard index `|a ∪ b| / |a ∩ b|` of two sorted id lists.
///
/// Infinite when the sets are disjoint; expansions never call it on
/// disjoint sets.
pub fn inverse_jaccard(a: &[usize], b: &[usize]) -> f64 {
    let common = count_common(a, b);
    let union = a.len() + b.len() - common;
    union as f64 / common as f64
}

/// Undirected simple graph with strictly positive edge weights.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted lexicographically;
/// the adjacency lists are sorted by neighbor id.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples. Self-loops and repeated pairs
    /// are dropped (the first occurrence of a pair wins); panics on a
    /// non-positive weight or out-of-range endpoint.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut list: Vec<(usize, usize, f64)> = edges
            .into_iter()
            .filter(|&(u, v, _)| u != v)
            .map(|(u, v, w)| if u < v { (u, v, w) } else { (v, u, w) })
            .collect();
        list.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        list.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);
        let mut adjacency = alloc::vec![Vec::new(); num_nodes];
        let mut pairs = Vec::with_capacity(list.len());
        let mut weights = Vec::with_capacity(list.len());
        for (idx, &(u, v, w)) in list.iter().enumerate() {
            assert!(u < num_nodes && v < num_nodes, "edge endpoint out of range");
            assert!(w > 0.0 && !w.is_nan(), "edge weights must be positive");
            adjacency[u].push((v, idx));
            adjacency[v].push((u, idx));
            pairs.push((u, v));
            weights.push(w);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Self { num_nodes, edges: pairs, weights, adjacency }
    }

    /// Same topology with a new weight vector (indexed like [`Self::edges`]).
    pub fn with_weights(&self, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), self.edges.len());
        Self { weights, ..self.clone() }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.weights[edge]
    }

    /// `(neighbor, edge index)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let adj = self.adjacency.get(u)?;
        adj.binary_search_by_key(&v, |&(n, _)| n).ok().map(|i| adj[i].1)
    }
}

/// Clique expansion: nodes of `h`, an edge for every pair sharing a hyperedge.
///
/// Under [`WeightingScheme::Jaccard`] the weight of `(x, y)` is the inverse
/// Jaccard index of the stars of `x` and `y`.
pub fn clique_expansion(h: &Hypergraph, scheme: WeightingScheme) -> WeightedGraph {
    let mut pairs = Vec::new();
    for edge in h.edges() {
        for (i, &u) in edge.iter().enumerate() {
            for &v in &edge[i + 1..] {
                pairs.push((u, v));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let weighted = pairs.into_iter().map(|(u, v)| {
        let w = match scheme {
            WeightingScheme::Uniform => 1.0,
            WeightingScheme::Jaccard => inverse_jaccard(h.star_unchecked(u), h.star_unchecked(v)),
        };
        (u, v, w)
    });
    WeightedGraph::from_edges(h.num_nodes(), weighted)
}

/// Line expansion: one node per hyperedge, an edge between intersecting
/// hyperedges.
///
/// Duplicate hyperedges stay distinct nodes (Jaccard weight 1 between them).
pub fn line_expansion(h: &Hypergraph, scheme: WeightingScheme) -> WeightedGraph {
    let mut pairs = Vec::new();
    for v in 0..h.num_nodes() {
        let star = h.star_unchecked(v);
        for (i, &e) in star.iter().enumerate() {
            for &f in &star[i + 1..] {
                pairs.push((e, f));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let weighted = pairs.into_iter().map(|(e, f)| {
        let w = match scheme {
            WeightingScheme::Uniform => 1.0,
            WeightingScheme::Jaccard => inverse_jaccard(h.edge(e), h.edge(f)),
        };
        (e, f, w)
    });
    WeightedGraph::from_edges(h.num_edges(), weighted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn binom2(n: usize) -> usize {
        n * (n - 1) / 2
    }

    #[test]
    fn single_edge_uniform_is_triangle() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let g = clique_expansion(&h, WeightingScheme::Uniform);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.weights(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn clique_jaccard_on_stars() {
        // St(0) = {e0, e1}, St(1) = {e1}
        let h = Hypergraph::new(3, vec![vec![0, 2], vec![0, 1]]).unwrap();
        let g = clique_expansion(&h, WeightingScheme::Jaccard);
        let idx = g.edge_index(0, 1).unwrap();
        assert_eq!(g.weight(idx), 2.0);
    }

    #[test]
    fn line_expansion_of_path() {
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let g = line_expansion(&h, WeightingScheme::Uniform);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn line_jaccard_on_node_sets() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let g = line_expansion(&h, WeightingScheme::Jaccard);
        assert_eq!(g.weights(), &[4.0]);
    }

    #[test]
    fn duplicate_hyperedges_in_expansions() {
        let h = Hypergraph::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let line = line_expansion(&h, WeightingScheme::Jaccard);
        assert_eq!(line.weights(), &[1.0]);
        let clique = clique_expansion(&h, WeightingScheme::Jaccard);
        assert_eq!(clique.num_edges(), 1);
        assert_eq!(clique.weights(), &[1.0]);
    }

    fn toy(a: usize, b: usize) -> Hypergraph {
        let mut edges = Vec::new();
        for c in 0..b {
            for i in 0..a {
                for j in i + 1..a {
                    edges.push(vec![c * a + i, c * a + j]);
                }
            }
        }
        edges.push((0..b).map(|c| c * a).collect());
        Hypergraph::new(a * b, edges).unwrap()
    }

    #[test]
    fn toy_expansion_sizes() {
        let h = toy(6, 4);
        let clique = clique_expansion(&h, WeightingScheme::Uniform);
        assert_eq!(clique.num_edges(), 4 * binom2(6) + binom2(4));
        assert_eq!(clique.num_edges(), 66);
        let line = line_expansion(&h, WeightingScheme::Uniform);
        assert_eq!(line.num_nodes(), 61);
        // The big hyperedge is last; it touches the 5 binary edges at each gateway.
        assert_eq!(line.degree(60), 20);
    }

    #[test]
    fn adjacency_lookup() {
        let g = WeightedGraph::from_edges(3, vec![(2, 0, 1.5), (0, 1, 1.0), (0, 2, 9.0), (1, 1, 1.0)]);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.weight(g.edge_index(2, 0).unwrap()), 1.5);
        assert_eq!(g.edge_index(1, 2), None);
        assert_eq!(g.neighbors(0), &[(1, 0), (2, 1)]);
    }
}
