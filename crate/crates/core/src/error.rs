use alloc::vec::Vec;

use crate::hypergraph::Violation;

/// Errors produced by the hypergraph Ricci-flow library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid hypergraph: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidHypergraph(Vec<Violation>),
    #[error("node {node} out of range (n = {num_nodes})")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("node {0} has no neighbors")]
    NoNeighbors(usize),
    #[error("node {0} has an empty star")]
    EmptyStar(usize),
    #[error("reduced star of node {x} relative to {y} is empty")]
    ReducedStarEmpty { x: usize, y: usize },
    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("disconnected supports: infinite transport cost")]
    DisconnectedSupports,
    #[error("invalid probability measure: {0}")]
    InvalidMeasure(&'static str),
    #[error("cost matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    CostShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("sinkhorn did not converge in {iterations} iterations (best cost {best_cost}, gap {gap})")]
    SinkhornNotConverged {
        iterations: usize,
        best_cost: f64,
        gap: f64,
    },
    #[error("cannot aggregate an empty list")]
    EmptyAggregate,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("threshold selection by NMI requires ground-truth labels")]
    MissingGroundTruth,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("computation aborted")]
    Aborted,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
