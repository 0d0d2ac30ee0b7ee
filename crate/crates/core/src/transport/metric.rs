//! Shortest-path metric over a weighted graph with per-source memoization.

use alloc::boxed::Box;
use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use once_cell::race::OnceBox;

use crate::graph::WeightedGraph;

/// Dense row-major matrix of pairwise costs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra; unreachable nodes get `+inf`.
pub fn dijkstra(graph: &WeightedGraph, source: usize) -> Vec<f64> {
    let mut dist = alloc::vec![f64::INFINITY; graph.num_nodes()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State { dist: 0.0, node: source });
    while let Some(State { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, e) in graph.neighbors(node) {
            let nd = d + graph.weight(e);
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(State { dist: nd, node: next });
            }
        }
    }
    dist
}

/// Shortest-path distances on a fixed graph, computed lazily one source at
/// a time and cached. Safe to share between threads.
pub struct MetricOracle {
    graph: WeightedGraph,
    cache: Vec<OnceBox<Vec<f64>>>,
}

impl MetricOracle {
    pub fn new(graph: WeightedGraph) -> Self {
        let cache = (0..graph.num_nodes()).map(|_| OnceBox::new()).collect();
        Self { graph, cache }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// Distances from `source` to every node.
    pub fn distances_from(&self, source: usize) -> &[f64] {
        self.cache[source].get_or_init(|| Box::new(dijkstra(&self.graph, source)))
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        self.distances_from(u)[v]
    }

    /// Distances between every source (rows) and target (columns).
    pub fn distances(&self, sources: &[usize], targets: &[usize]) -> DistanceMatrix {
        let mut data = Vec::with_capacity(sources.len() * targets.len());
        for &s in sources {
            let row = self.distances_from(s);
            data.extend(targets.iter().map(|&t| row[t]));
        }
        DistanceMatrix::new(sources.len(), targets.len(), data)
    }

    /// Number of sources whose distances are currently cached.
    pub fn cached_sources(&self) -> usize {
        self.cache.iter().filter(|c| c.get().is_some()).count()
    }
}

impl core::fmt::Debug for MetricOracle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MetricOracle")
            .field("nodes", &self.graph.num_nodes())
            .field("cached_sources", &self.cached_sources())
            .finish()
    }
}
