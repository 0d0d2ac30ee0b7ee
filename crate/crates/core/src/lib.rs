//! Ricci-flow clustering of hypergraphs.
//!
//! Works without `std` (an allocator is required). Enable `parallel` to
//! spread curvature computations over a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod clustering;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod graph;
pub mod hypergraph;
pub mod synth;
pub mod transport;

pub use clustering::{
    cluster, graph_modularity, hypergraph_modularity, nmi, select_threshold, trim_and_components, ClusterReport,
    Clustering, Selection, ThresholdCriterion,
};
pub use curvature::{aggregate, edge_ricci_pair, node_ricci_pair, Aggregation, CurvatureConfig, MeasureVariant, NeighborDistance};
pub use error::{Error, Result};
pub use flow::{run_flow, run_flow_until, EdgeAggregation, FlowConfig, FlowState, Method};
pub use graph::{clique_expansion, line_expansion, WeightedGraph, WeightingScheme};
pub use hypergraph::{EdgeId, Hypergraph, NodeId, Violation};
pub use transport::{ProbabilityMeasure, Solver};
pub use synth::{gen_hsbm, gen_toy, gen_uniform, EdgeClass, HsbmParams};
