//! Discrete Ricci flows producing hyperedge weights.
//!
//! Node-Ricci flow evolves the weights of the clique expansion and only
//! aggregates them onto hyperedges at the end. Edge-Ricci flow aggregates
//! onto hyperedges at every iteration and keeps the line-graph metric fixed.

use alloc::vec::Vec;

use crate::curvature::{
    aggregate, neighbor_measure, node_ricci_from_measures, shared_max_weight, Aggregation, CurvatureConfig,
    MeasureVariant, NeighborDistance,
};
use crate::error::{Error, Result};
use crate::graph::{clique_expansion, line_expansion, WeightedGraph, WeightingScheme};
use crate::hypergraph::Hypergraph;
use crate::transport::{
    edge_measure, edge_measure_reduced, metric_w1, MetricOracle, ProbabilityMeasure,
};

/// Weights never drop below this value.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    NodeRicci,
    #[default]
    EdgeRicci,
}

/// What edge-Ricci flow aggregates over the node pairs of a hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeAggregation {
    /// Pairwise updated weights `(1 - kappa(x, y)) w(e)`, as node-Ricci
    /// flow does. With `Max` a hyperedge follows its least curved pair.
    #[default]
    Flow,
    /// Pairwise curvatures. With `Max` a hyperedge follows its most curved pair.
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub iterations: usize,
    pub curvature: CurvatureConfig,
    pub clique_weighting: WeightingScheme,
    pub line_weighting: WeightingScheme,
    pub method: Method,
    pub edge_aggregation: EdgeAggregation,
    /// Record the weights after every iteration.
    pub keep_history: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            iterations: 20,
            curvature: CurvatureConfig::default(),
            clique_weighting: WeightingScheme::Jaccard,
            line_weighting: WeightingScheme::Jaccard,
            method: Method::EdgeRicci,
            edge_aggregation: EdgeAggregation::Flow,
            keep_history: false,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("flow needs at least one iteration"));
        }
        self.curvature.validate()
    }
}

/// Weights after one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub hyperedge_weights: Vec<f64>,
    /// Clique-edge weights (node-Ricci only).
    pub pair_weights: Option<Vec<f64>>,
}

/// Result of a flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub method: Method,
    pub iteration: usize,
    pub hyperedge_weights: Vec<f64>,
    /// Clique-expansion edges `(u, v)` and their flow weights (node-Ricci only).
    pub pairs: Option<Vec<(usize, usize)>>,
    pub pair_weights: Option<Vec<f64>>,
    /// Empty unless history was requested.
    pub history: Vec<Snapshot>,
    /// Largest relative weight change in the last iteration.
    pub last_relative_change: f64,
    /// Node measures that fell back to uniform neighbor mass.
    pub measure_fallbacks: usize,
}

/// Runs the configured method for `cfg.iterations` steps.
pub fn run_flow(h: &Hypergraph, cfg: &FlowConfig) -> Result<FlowState> {
    run_flow_until(h, cfg, &never)
}

/// [`run_flow`] that gives up with [`Error::Aborted`] once `abort` returns `true`.
pub fn run_flow_until(h: &Hypergraph, cfg: &FlowConfig, abort: AbortCheck<'_>) -> Result<FlowState> {
    match cfg.method {
        Method::NodeRicci => {
            let mut flow = NodeRicciFlow::new(h, cfg)?;
            for _ in 0..cfg.iterations {
                flow.step(abort)?;
            }
            Ok(flow.into_state())
        }
        Method::EdgeRicci => {
            let mut flow = EdgeRicciFlow::new(h, cfg)?;
            for _ in 0..cfg.iterations {
                flow.step(abort)?;
            }
            Ok(flow.into_state())
        }
    }
}

pub fn node_ricci_flow(h: &Hypergraph, cfg: &FlowConfig) -> Result<FlowState> {
    run_flow(h, &FlowConfig { method: Method::NodeRicci, ..*cfg })
}

pub fn edge_ricci_flow(h: &Hypergraph, cfg: &FlowConfig) -> Result<FlowState> {
    run_flow(h, &FlowConfig { method: Method::EdgeRicci, ..*cfg })
}

fn never() -> bool {
    false
}

/// Callback polled between pair computations; returning `true` aborts the
/// current iteration with [`Error::Aborted`].
pub type AbortCheck<'a> = &'a (dyn Fn() -> bool + Sync);

/// Clique-edge indices of every node pair inside each hyperedge.
fn pair_members(h: &Hypergraph, clique: &WeightedGraph) -> Vec<Vec<usize>> {
    h.edges()
        .iter()
        .map(|edge| {
            let mut members = Vec::with_capacity(edge.len() * (edge.len() - 1) / 2);
            for (i, &u) in edge.iter().enumerate() {
                for &v in &edge[i + 1..] {
                    members.push(clique.edge_index(u, v).expect("clique expansion covers every pair"));
                }
            }
            members
        })
        .collect()
}

fn aggregate_members(members: &[Vec<usize>], values: &[f64], agg: Aggregation) -> Vec<f64> {
    let mut buf = Vec::new();
    members
        .iter()
        .map(|m| {
            buf.clear();
            buf.extend(m.iter().map(|&k| values[k]));
            aggregate(&buf, agg).expect("hyperedges have at least one pair")
        })
        .collect()
}

fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter().zip(new).map(|(a, b)| ((b - a) / a).abs()).fold(0.0, f64::max)
}

/// Evaluates `f` on `0..count` in order, polling `abort`.
#[cfg(not(feature = "parallel"))]
fn map_indices<F>(count: usize, abort: AbortCheck<'_>, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if abort() {
            return Err(Error::Aborted);
        }
        out.push(f(k)?);
    }
    Ok(out)
}

#[cfg(feature = "parallel")]
fn map_indices<F>(count: usize, abort: AbortCheck<'_>, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|k| if abort() { Err(Error::Aborted) } else { f(k) })
        .collect()
}

/// Step-wise node-Ricci flow on the clique expansion.
pub struct NodeRicciFlow<'h> {
    h: &'h Hypergraph,
    cfg: FlowConfig,
    graph: WeightedGraph,
    members: Vec<Vec<usize>>,
    iteration: usize,
    history: Vec<Snapshot>,
    last_change: f64,
    fallbacks: usize,
}

impl<'h> NodeRicciFlow<'h> {
    pub fn new(h: &'h Hypergraph, cfg: &FlowConfig) -> Result<Self> {
        cfg.validate()?;
        let graph = clique_expansion(h, cfg.clique_weighting);
        let members = pair_members(h, &graph);
        Ok(Self {
            h,
            cfg: *cfg,
            graph,
            members,
            iteration: 0,
            history: Vec::new(),
            last_change: 0.0,
            fallbacks: 0,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Curvature of every clique edge under the current weights.
    pub fn curvatures(&mut self, abort: AbortCheck<'_>) -> Result<Vec<f64>> {
        let oracle = MetricOracle::new(self.graph.clone());
        let cc = self.cfg.curvature;
        let mut measures: Vec<Option<ProbabilityMeasure>> = Vec::with_capacity(self.graph.num_nodes());
        for v in 0..self.graph.num_nodes() {
            if self.graph.degree(v) == 0 {
                measures.push(None);
                continue;
            }
            let (m, fallback) = neighbor_measure(&oracle, v, &cc)?;
            self.fallbacks += fallback as usize;
            measures.push(Some(m));
        }
        let graph = &self.graph;
        map_indices(graph.num_edges(), abort, |k| {
            let (u, v) = graph.edges()[k];
            let (Some(mu), Some(mv)) = (&measures[u], &measures[v]) else {
                unreachable!("endpoints of an edge have neighbors")
            };
            let length = match cc.neighbor_distance {
                NeighborDistance::Direct => graph.weight(k),
                NeighborDistance::Geodesic => oracle.distance(u, v),
            };
            node_ricci_from_measures(&oracle, mu, mv, length, cc.solver)
        })
    }

    /// One flow iteration: `w <- (1 - kappa) w` on every clique edge.
    pub fn step(&mut self, abort: AbortCheck<'_>) -> Result<()> {
        let kappa = self.curvatures(abort)?;
        let old = self.graph.weights();
        let new: Vec<f64> =
            old.iter().zip(&kappa).map(|(&w, &k)| ((1.0 - k) * w).max(WEIGHT_FLOOR)).collect();
        self.last_change = relative_change(old, &new);
        self.graph = self.graph.with_weights(new);
        self.iteration += 1;
        if self.cfg.keep_history {
            self.history.push(Snapshot {
                iteration: self.iteration,
                hyperedge_weights: self.hyperedge_weights(),
                pair_weights: Some(self.graph.weights().to_vec()),
            });
        }
        Ok(())
    }

    /// Current clique-edge weights aggregated onto hyperedges.
    pub fn hyperedge_weights(&self) -> Vec<f64> {
        aggregate_members(&self.members, self.graph.weights(), self.cfg.curvature.aggregation)
    }

    pub fn into_state(self) -> FlowState {
        FlowState {
            method: Method::NodeRicci,
            iteration: self.iteration,
            hyperedge_weights: self.hyperedge_weights(),
            pairs: Some(self.graph.edges().to_vec()),
            pair_weights: Some(self.graph.weights().to_vec()),
            history: self.history,
            last_relative_change: self.last_change,
            measure_fallbacks: self.fallbacks,
        }
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        self.h
    }
}

/// Step-wise edge-Ricci flow with star measures moved over the line graph.
pub struct EdgeRicciFlow<'h> {
    h: &'h Hypergraph,
    cfg: FlowConfig,
    line_oracle: MetricOracle,
    pairs: Vec<(usize, usize)>,
    members: Vec<Vec<usize>>,
    weights: Vec<f64>,
    iteration: usize,
    history: Vec<Snapshot>,
    last_change: f64,
}

impl<'h> EdgeRicciFlow<'h> {
    pub fn new(h: &'h Hypergraph, cfg: &FlowConfig) -> Result<Self> {
        cfg.validate()?;
        let clique = clique_expansion(h, WeightingScheme::Uniform);
        let members = pair_members(h, &clique);
        let line_oracle = MetricOracle::new(line_expansion(h, cfg.line_weighting));
        Ok(Self {
            h,
            cfg: *cfg,
            line_oracle,
            pairs: clique.edges().to_vec(),
            members,
            weights: h.weights().to_vec(),
            iteration: 0,
            history: Vec::new(),
            last_change: 0.0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn line_oracle(&self) -> &MetricOracle {
        &self.line_oracle
    }

    /// Adjacent node pairs, in the order [`Self::pair_curvatures`] reports them.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Edge-Ricci curvature of every adjacent node pair.
    pub fn pair_curvatures(&self, abort: AbortCheck<'_>) -> Result<Vec<f64>> {
        let h = self.h;
        let weights = &self.weights;
        let cc = self.cfg.curvature;
        let oracle = &self.line_oracle;
        let standard: Vec<Option<ProbabilityMeasure>> = match cc.measure {
            MeasureVariant::Standard => (0..h.num_nodes())
                .map(|v| if h.degree(v) == 0 { Ok(None) } else { edge_measure(h, weights, v).map(Some) })
                .collect::<Result<_>>()?,
            MeasureVariant::Reduced => Vec::new(),
        };
        let pairs = &self.pairs;
        map_indices(pairs.len(), abort, |k| {
            let (x, y) = pairs[k];
            let denom = shared_max_weight(h.star_unchecked(x), h.star_unchecked(y), weights)
                .ok_or(Error::NotAdjacent(x, y))?;
            let w = match cc.measure {
                MeasureVariant::Standard => {
                    let (Some(mx), Some(my)) = (&standard[x], &standard[y]) else {
                        unreachable!("adjacent nodes have nonempty stars")
                    };
                    metric_w1(mx, my, oracle, cc.solver)?
                }
                MeasureVariant::Reduced => {
                    match (edge_measure_reduced(h, weights, x, y), edge_measure_reduced(h, weights, y, x)) {
                        (Ok(mx), Ok(my)) => metric_w1(&mx, &my, oracle, cc.solver)?,
                        (Err(Error::ReducedStarEmpty { .. }), _) | (_, Err(Error::ReducedStarEmpty { .. })) => {
                            return Ok(1.0)
                        }
                        (Err(e), _) | (_, Err(e)) => return Err(e),
                    }
                }
            };
            Ok(1.0 - w / denom)
        })
    }

    /// One iteration: pair curvatures, aggregation per hyperedge, then
    /// `w(e) <- (1 - kappa(e)) w(e)`.
    pub fn step(&mut self, abort: AbortCheck<'_>) -> Result<()> {
        let kappa = self.pair_curvatures(abort)?;
        let agg = self.cfg.curvature.aggregation;
        let edge_kappa = match self.cfg.edge_aggregation {
            EdgeAggregation::Curvature => aggregate_members(&self.members, &kappa, agg),
            EdgeAggregation::Flow => {
                let factors: Vec<f64> = kappa.iter().map(|k| 1.0 - k).collect();
                aggregate_members(&self.members, &factors, agg).into_iter().map(|f| 1.0 - f).collect()
            }
        };
        let new: Vec<f64> = self
            .weights
            .iter()
            .zip(&edge_kappa)
            .map(|(&w, &k)| ((1.0 - k) * w).max(WEIGHT_FLOOR))
            .collect();
        self.last_change = relative_change(&self.weights, &new);
        self.weights = new;
        self.iteration += 1;
        if self.cfg.keep_history {
            self.history.push(Snapshot {
                iteration: self.iteration,
                hyperedge_weights: self.weights.clone(),
                pair_weights: None,
            });
        }
        Ok(())
    }

    pub fn into_state(self) -> FlowState {
        FlowState {
            method: Method::EdgeRicci,
            iteration: self.iteration,
            hyperedge_weights: self.weights,
            pairs: None,
            pair_weights: None,
            history: self.history,
            last_relative_change: self.last_change,
            measure_fallbacks: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_iterations_rejected() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let cfg = FlowConfig { iterations: 0, ..Default::default() };
        assert!(run_flow(&h, &cfg).is_err());
    }

    #[test]
    fn two_node_graph_keeps_its_weight() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let cfg = FlowConfig {
            iterations: 5,
            method: Method::NodeRicci,
            clique_weighting: WeightingScheme::Uniform,
            curvature: CurvatureConfig { alpha: 0.0, p: 0.0, ..Default::default() },
            keep_history: true,
            ..Default::default()
        };
        let state = run_flow(&h, &cfg).unwrap();
        for snap in &state.history {
            assert_abs_diff_eq!(snap.pair_weights.as_ref().unwrap()[0], 1.0, epsilon = 1e-15);
        }
        assert_eq!(state.hyperedge_weights, vec![1.0]);
    }

    #[test]
    fn single_binary_edge_collapses_under_edge_flow() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let cfg = FlowConfig { iterations: 1, ..Default::default() };
        let state = run_flow(&h, &cfg).unwrap();
        assert_eq!(state.hyperedge_weights, vec![WEIGHT_FLOOR]);
    }

    #[test]
    fn abort_is_reported() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mut flow = EdgeRicciFlow::new(&h, &FlowConfig::default()).unwrap();
        assert_eq!(flow.step(&|| true), Err(Error::Aborted));
        assert_eq!(flow.iteration(), 0);
    }
}
