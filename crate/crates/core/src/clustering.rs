//! Threshold trimming, connected components, threshold selection and
//! partition scores.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowConfig, FlowState, Method};
use crate::graph::{clique_expansion, WeightedGraph, WeightingScheme};
use crate::hypergraph::Hypergraph;

/// Where a clustering came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub method: Method,
    pub tau: f64,
    pub iterations: usize,
}

/// A hard partition of the nodes. Community ids are dense and numbered in
/// order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    labels: Vec<usize>,
    num_communities: usize,
    provenance: Option<Provenance>,
}

impl Clustering {
    /// Relabels arbitrary community ids canonically.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut seen = BTreeMap::new();
        let labels = raw
            .iter()
            .map(|&l| {
                let next = seen.len();
                *seen.entry(l).or_insert(next)
            })
            .collect();
        Self { labels, num_communities: seen.len(), provenance: None }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_communities(&self) -> usize {
        self.num_communities
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_communities];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// True when every community of `self` lies inside one community of `coarser`.
    pub fn refines(&self, coarser: &Clustering) -> bool {
        if self.labels.len() != coarser.labels.len() {
            return false;
        }
        let mut image = vec![usize::MAX; self.num_communities];
        for (&fine, &coarse) in self.labels.iter().zip(&coarser.labels) {
            if image[fine] == usize::MAX {
                image[fine] = coarse;
            } else if image[fine] != coarse {
                return false;
            }
        }
        true
    }
}

/// How to choose the trimming threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdCriterion {
    Fixed(f64),
    /// Modularity of the unweighted clique expansion.
    MaxGraphModularity,
    /// Strict hypergraph modularity.
    MaxHypergraphModularity,
    /// Agreement with a ground truth labeling.
    MaxNmi,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    fn add_edge(&mut self, edge: &[usize]) {
        for w in edge.windows(2) {
            self.union(w[0], w[1]);
        }
    }

    fn clustering(&mut self) -> Clustering {
        let roots: Vec<usize> = (0..self.parent.len()).map(|v| self.find(v)).collect();
        Clustering::from_labels(&roots)
    }
}

/// Keeps hyperedges with weight at most `tau` and returns the connected
/// components of what is left. Nodes without kept edges are singletons.
pub fn trim_and_components(h: &Hypergraph, weights: &[f64], tau: f64) -> Clustering {
    let mut ds = DisjointSet::new(h.num_nodes());
    for (edge, &w) in h.edges().iter().zip(weights) {
        if w <= tau {
            ds.add_edge(edge);
        }
    }
    ds.clustering()
}

/// `Q = sum_c e(c)/|E| - sum_c (vol(c)/vol(V))^2` with the graph read as unweighted.
pub fn graph_modularity(g: &WeightedGraph, partition: &Clustering) -> Result<f64> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if partition.num_nodes() != g.num_nodes() {
        return Err(Error::LengthMismatch(partition.num_nodes(), g.num_nodes()));
    }
    let labels = partition.labels();
    let m = g.num_edges() as f64;
    let mut inside = 0usize;
    let mut vol = vec![0usize; partition.num_communities()];
    for &(u, v) in g.edges() {
        if labels[u] == labels[v] {
            inside += 1;
        }
        vol[labels[u]] += 1;
        vol[labels[v]] += 1;
    }
    let total = 2.0 * m;
    let expected: f64 = vol.iter().map(|&c| (c as f64 / total) * (c as f64 / total)).sum();
    Ok(inside as f64 / m - expected)
}

/// Strict hypergraph modularity: hyperedges count as internal only when
/// entirely inside one community, and a size-`d` hyperedge is expected to
/// be internal with probability `sum_c (vol(c)/vol(V))^d`.
pub fn hypergraph_modularity(h: &Hypergraph, partition: &Clustering) -> Result<f64> {
    if h.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if partition.num_nodes() != h.num_nodes() {
        return Err(Error::LengthMismatch(partition.num_nodes(), h.num_nodes()));
    }
    let labels = partition.labels();
    let mut vol = vec![0usize; partition.num_communities()];
    for v in 0..h.num_nodes() {
        vol[labels[v]] += h.degree(v);
    }
    let total: usize = vol.iter().sum();
    let share: Vec<f64> = vol.iter().map(|&c| c as f64 / total as f64).collect();
    let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
    let mut inside = 0usize;
    for edge in h.edges() {
        *by_size.entry(edge.len()).or_insert(0) += 1;
        let l = labels[edge[0]];
        if edge.iter().all(|&v| labels[v] == l) {
            inside += 1;
        }
    }
    let m = h.num_edges() as f64;
    let expected: f64 = by_size
        .iter()
        .map(|(&d, &count)| count as f64 / m * share.iter().map(|&s| libm::pow(s, d as f64)).sum::<f64>())
        .sum();
    Ok(inside as f64 / m - expected)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts.filter(|&c| c > 0).map(|c| c as f64 / n).map(|p| -p * libm::log(p)).sum()
}

/// Normalized mutual information with arithmetic-mean normalization.
/// Two single-class labelings score 1.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_insert(0) += 1;
        *ca.entry(x).or_insert(0) += 1;
        *cb.entry(y).or_insert(0) += 1;
    }
    let ha = entropy(ca.values().copied(), n);
    let hb = entropy(cb.values().copied(), n);
    let mean = 0.5 * (ha + hb);
    if mean <= 0.0 {
        return Ok(1.0);
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let p = c as f64 / n;
            p * libm::log(p * n * n / (ca[&x] as f64 * cb[&y] as f64))
        })
        .sum();
    Ok((mi / mean).clamp(0.0, 1.0))
}

/// Scores of one candidate threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub tau: f64,
    pub num_communities: usize,
    pub graph_modularity: f64,
    pub hypergraph_modularity: f64,
    pub nmi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub tau: f64,
    pub clustering: Clustering,
    /// Criterion value at `tau` (hypergraph modularity for a fixed threshold).
    pub score: f64,
    /// Every candidate in increasing order of `tau`.
    pub curve: Vec<CurvePoint>,
}

/// Sorted distinct finite weights.
pub fn candidate_thresholds(weights: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = weights.iter().copied().filter(|w| w.is_finite()).collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

/// Evaluates every candidate threshold and returns the smallest maximizer
/// of the criterion.
pub fn select_threshold(
    h: &Hypergraph,
    weights: &[f64],
    criterion: ThresholdCriterion,
    truth: Option<&[usize]>,
) -> Result<Selection> {
    if weights.len() != h.num_edges() {
        return Err(Error::LengthMismatch(weights.len(), h.num_edges()));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter("flow weights must be finite"));
    }
    if criterion == ThresholdCriterion::MaxNmi && truth.is_none() {
        return Err(Error::MissingGroundTruth);
    }
    if let Some(t) = truth {
        if t.len() != h.num_nodes() {
            return Err(Error::LengthMismatch(t.len(), h.num_nodes()));
        }
    }
    if let ThresholdCriterion::Fixed(tau) = criterion {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter("threshold must be nonnegative"));
        }
    }
    let clique = clique_expansion(h, WeightingScheme::Uniform);
    let score_point = |tau: f64, clustering: &Clustering| -> Result<CurvePoint> {
        Ok(CurvePoint {
            tau,
            num_communities: clustering.num_communities(),
            graph_modularity: if clique.num_edges() == 0 { 0.0 } else { graph_modularity(&clique, clustering)? },
            hypergraph_modularity: hypergraph_modularity(h, clustering)?,
            nmi: truth.map(|t| nmi(t, clustering.labels())).transpose()?,
        })
    };

    let mut order: Vec<usize> = (0..h.num_edges()).collect();
    order.sort_by(|&i, &j| weights[i].total_cmp(&weights[j]).then(i.cmp(&j)));
    let mut ds = DisjointSet::new(h.num_nodes());
    let mut curve = Vec::new();
    let mut best: Option<(f64, Clustering, f64)> = None;
    let mut k = 0;
    while k < order.len() {
        let tau = weights[order[k]];
        while k < order.len() && weights[order[k]] == tau {
            ds.add_edge(h.edge(order[k]));
            k += 1;
        }
        let clustering = ds.clustering();
        let point = score_point(tau, &clustering)?;
        let score = match criterion {
            ThresholdCriterion::Fixed(_) => f64::NEG_INFINITY,
            ThresholdCriterion::MaxGraphModularity => point.graph_modularity,
            ThresholdCriterion::MaxHypergraphModularity => point.hypergraph_modularity,
            ThresholdCriterion::MaxNmi => point.nmi.unwrap_or(0.0),
        };
        if best.as_ref().map_or(true, |b| score > b.2) {
            best = Some((tau, clustering, score));
        }
        curve.push(point);
    }

    if let ThresholdCriterion::Fixed(tau) = criterion {
        let clustering = trim_and_components(h, weights, tau);
        let score = score_point(tau, &clustering)?.hypergraph_modularity;
        return Ok(Selection { tau, clustering, score, curve });
    }
    let (tau, clustering, score) = best.ok_or(Error::EmptyGraph)?;
    Ok(Selection { tau, clustering, score, curve })
}

/// Output of the end-to-end pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub flow: FlowState,
    pub selection: Selection,
    /// Equal-width histogram of final hyperedge weights: `(low, high, count)`.
    pub histogram: Vec<(f64, f64, usize)>,
    /// NMI of the selected clustering against the ground truth, if given.
    pub nmi: Option<f64>,
}

impl ClusterReport {
    pub fn clustering(&self) -> &Clustering {
        &self.selection.clustering
    }
}

pub fn weight_histogram(weights: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let finite: Vec<f64> = weights.iter().copied().filter(|w| w.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return vec![(lo, hi, finite.len())];
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for w in finite {
        counts[(((w - lo) / width) as usize).min(bins - 1)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

/// Flow, threshold selection and component extraction in one call.
pub fn cluster(
    h: &Hypergraph,
    cfg: &FlowConfig,
    criterion: ThresholdCriterion,
    truth: Option<&[usize]>,
) -> Result<ClusterReport> {
    if criterion == ThresholdCriterion::MaxNmi && truth.is_none() {
        return Err(Error::MissingGroundTruth);
    }
    let flow = run_flow(h, cfg)?;
    cluster_weights(h, flow, criterion, truth)
}

/// Threshold selection on the output of an already completed flow.
pub fn cluster_weights(
    h: &Hypergraph,
    flow: FlowState,
    criterion: ThresholdCriterion,
    truth: Option<&[usize]>,
) -> Result<ClusterReport> {
    let mut selection = select_threshold(h, &flow.hyperedge_weights, criterion, truth)?;
    selection.clustering = selection.clustering.clone().with_provenance(Provenance {
        method: flow.method,
        tau: selection.tau,
        iterations: flow.iteration,
    });
    let nmi = truth.map(|t| nmi(t, selection.clustering.labels())).transpose()?;
    let histogram = weight_histogram(&flow.hyperedge_weights, 10);
    Ok(ClusterReport { flow, selection, histogram, nmi })
}
