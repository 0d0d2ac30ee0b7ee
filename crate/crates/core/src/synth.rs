//! Seeded synthetic hypergraphs: the toy model `H(a, b)` and a hypergraph
//! stochastic block model.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. Edge `j`
//! (intra-edges first, then inter-edges) draws from stream `j`, so each edge
//! is reproducible on its own. Indices are drawn as `u32` values, which
//! keeps output identical across pointer widths.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Class of a toy-model hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// The size-`b` hyperedge over all gateway nodes.
    GatewayEdge,
    /// Binary edge incident to a gateway node.
    GatewayBinary,
    /// Binary edge between two non-gateway nodes.
    Internal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    pub hypergraph: Hypergraph,
    pub labels: Vec<usize>,
    pub tags: Vec<EdgeClass>,
}

/// `b` complete graphs on `a` nodes each, plus one hyperedge joining node
/// `c * a` of every community `c`.
///
/// Edges are listed community by community in lexicographic pair order,
/// with the gateway hyperedge last.
pub fn gen_toy(a: usize, b: usize) -> Result<ToyModel> {
    if a < 3 || b < 3 {
        return Err(Error::InvalidParameter("toy model needs a >= 3 and b >= 3"));
    }
    let mut edges = Vec::with_capacity(b * a * (a - 1) / 2 + 1);
    let mut tags = Vec::with_capacity(edges.capacity());
    for c in 0..b {
        let base = c * a;
        for i in 0..a {
            for j in i + 1..a {
                edges.push(vec![base + i, base + j]);
                tags.push(if i == 0 { EdgeClass::GatewayBinary } else { EdgeClass::Internal });
            }
        }
    }
    edges.push((0..b).map(|c| c * a).collect());
    tags.push(EdgeClass::GatewayEdge);
    let labels = (0..a * b).map(|v| v / a).collect();
    Ok(ToyModel { hypergraph: Hypergraph::new(a * b, edges)?, labels, tags })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HsbmParams {
    pub n: usize,
    pub k: usize,
    pub s_in: usize,
    pub s_out: usize,
    pub n_in: usize,
    pub n_out: usize,
    pub seed: u64,
    /// Read `n_in` as a per-community count instead of a total.
    pub n_in_per_community: bool,
}

impl HsbmParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n == 0 || self.n % self.k != 0 {
            return Err(Error::InvalidParameter("n must be a positive multiple of k"));
        }
        if self.s_in < 2 || self.s_out < 2 {
            return Err(Error::InvalidParameter("edge sizes must be at least 2"));
        }
        if self.s_in > self.n / self.k {
            return Err(Error::InvalidParameter("s_in exceeds the community size"));
        }
        if self.s_out > self.n {
            return Err(Error::InvalidParameter("s_out exceeds the number of nodes"));
        }
        if self.s_out < self.k {
            return Err(Error::InvalidParameter("s_out must be at least k"));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many nodes"));
        }
        Ok(())
    }

    /// Total number of intra-community edges.
    pub fn total_intra(&self) -> usize {
        if self.n_in_per_community {
            self.n_in * self.k
        } else {
            self.n_in
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hsbm {
    pub hypergraph: Hypergraph,
    pub labels: Vec<usize>,
}

fn edge_rng(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn draw_distinct(rng: &mut ChaCha8Rng, offset: usize, range: usize, count: usize, chosen: &mut Vec<usize>) {
    let target = chosen.len() + count;
    while chosen.len() < target {
        let v = offset + rng.gen_range(0..range as u32) as usize;
        if !chosen.contains(&v) {
            chosen.push(v);
        }
    }
}

/// Planted partition with contiguous equal-sized communities.
///
/// Intra-edges are dealt to communities round-robin, each a uniform
/// `s_in`-subset of its community. Each inter-edge takes one uniform node
/// per community and then `s_out - k` further distinct nodes uniformly from
/// the whole node set, redrawing on collision.
pub fn gen_hsbm(params: &HsbmParams) -> Result<Hsbm> {
    params.validate()?;
    let HsbmParams { n, k, s_in, s_out, seed, n_out, .. } = *params;
    let size = n / k;
    let intra = params.total_intra();
    let mut edges = Vec::with_capacity(intra + n_out);
    for j in 0..intra {
        let mut rng = edge_rng(seed, j);
        let c = j % k;
        let mut e = Vec::with_capacity(s_in);
        draw_distinct(&mut rng, c * size, size, s_in, &mut e);
        edges.push(e);
    }
    for j in 0..n_out {
        let mut rng = edge_rng(seed, intra + j);
        let mut e = Vec::with_capacity(s_out);
        for c in 0..k {
            draw_distinct(&mut rng, c * size, size, 1, &mut e);
        }
        draw_distinct(&mut rng, 0, n, s_out - k, &mut e);
        edges.push(e);
    }
    let labels = (0..n).map(|v| v / size).collect();
    Ok(Hsbm { hypergraph: Hypergraph::new(n, edges)?, labels })
}

/// `m` hyperedges of exactly `k` distinct nodes drawn uniformly from `n`,
/// edge `j` from stream `j`.
pub fn gen_uniform(n: usize, m: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    if k < 2 || k > n || n > u32::MAX as usize {
        return Err(Error::InvalidParameter("edge size must lie in [2, n]"));
    }
    let edges = (0..m)
        .map(|j| {
            let mut e = Vec::with_capacity(k);
            draw_distinct(&mut edge_rng(seed, j), 0, n, k, &mut e);
            e
        })
        .collect();
    Hypergraph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_counts() {
        let t = gen_toy(6, 4).unwrap();
        assert_eq!(t.hypergraph.num_nodes(), 24);
        assert_eq!(t.hypergraph.num_edges(), 61);
        assert_eq!(t.hypergraph.edges().iter().filter(|e| e.len() == 2).count(), 60);
        assert_eq!(t.hypergraph.edge(60), &[0, 6, 12, 18]);
        let t = gen_toy(3, 3).unwrap();
        assert_eq!((t.hypergraph.num_nodes(), t.hypergraph.num_edges()), (9, 10));
    }

    #[test]
    fn toy_tags() {
        for (a, b) in [(3, 3), (6, 4), (10, 5), (4, 8)] {
            let t = gen_toy(a, b).unwrap();
            let count = |c| t.tags.iter().filter(|&&x| x == c).count();
            assert_eq!(count(EdgeClass::GatewayEdge), 1);
            assert_eq!(count(EdgeClass::GatewayBinary), b * (a - 1));
            assert_eq!(count(EdgeClass::Internal), b * (a - 1) * (a - 2) / 2);
            for (e, tag) in t.hypergraph.edges().iter().zip(&t.tags) {
                let gateways = e.iter().filter(|&&v| v % a == 0).count();
                let expect = match e.len() {
                    2 if gateways == 1 => EdgeClass::GatewayBinary,
                    2 => EdgeClass::Internal,
                    _ => EdgeClass::GatewayEdge,
                };
                assert_eq!(*tag, expect);
            }
        }
        assert!(gen_toy(2, 5).is_err());
        assert!(gen_toy(5, 2).is_err());
    }

    fn params() -> HsbmParams {
        HsbmParams { n: 100, k: 2, s_in: 3, s_out: 4, n_in: 50, n_out: 30, seed: 9, n_in_per_community: false }
    }

    #[test]
    fn hsbm_structure() {
        let p = params();
        let g = gen_hsbm(&p).unwrap();
        let h = &g.hypergraph;
        assert_eq!(h.num_edges(), 80);
        for e in &h.edges()[..50] {
            assert_eq!(e.len(), 3);
            assert!(e.iter().all(|&v| g.labels[v] == g.labels[e[0]]));
        }
        for e in &h.edges()[50..] {
            assert_eq!(e.len(), 4);
            assert!(e.iter().any(|&v| g.labels[v] == 0) && e.iter().any(|&v| g.labels[v] == 1));
        }
        let first = h.edges()[..50].iter().filter(|e| g.labels[e[0]] == 0).count();
        assert_eq!(first, 25);
    }

    #[test]
    fn hsbm_seeded() {
        let p = params();
        assert_eq!(gen_hsbm(&p).unwrap(), gen_hsbm(&p).unwrap());
        let q = HsbmParams { seed: 10, ..p };
        assert_ne!(gen_hsbm(&p).unwrap(), gen_hsbm(&q).unwrap());
        let r = HsbmParams { n_in_per_community: true, ..p };
        assert_eq!(gen_hsbm(&r).unwrap().hypergraph.num_edges(), 130);
    }

    #[test]
    fn uniform_edges_have_size_k() {
        let h = gen_uniform(50, 30, 7, 1).unwrap();
        assert_eq!(h.num_edges(), 30);
        assert!(h.edges().iter().all(|e| e.len() == 7));
        assert_eq!(h, gen_uniform(50, 30, 7, 1).unwrap());
        assert!(gen_uniform(5, 3, 6, 0).is_err());
        assert!(gen_uniform(5, 3, 1, 0).is_err());
    }

    #[test]
    fn hsbm_rejects_bad_sizes() {
        let p = params();
        assert!(gen_hsbm(&HsbmParams { s_in: 51, ..p }).is_err());
        assert!(gen_hsbm(&HsbmParams { s_out: 101, ..p }).is_err());
        assert!(gen_hsbm(&HsbmParams { n: 101, ..p }).is_err());
        assert!(gen_hsbm(&HsbmParams { k: 5, s_out: 4, n: 100, s_in: 3, ..p }).is_err());
    }
}
