//! Weighted networks, vertex-set contraction and the ρ-augmentation.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeList, Graph, VertexSet};
use crate::scalar::{DenseMatrix, Scalar};

/// A symmetric nonnegatively weighted graph on `0..n`, optionally with
/// self-loop weights. Parallel edges are never stored: they are merged.
#[derive(Clone)]
pub struct Network<S = f64> {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<S>,
    cumulative: Vec<S>,
    strength: Vec<S>,
    loops: Vec<S>,
    unit: bool,
}

impl<S: Scalar> Network<S> {
    pub fn from_graph(g: &Graph) -> Self {
        let adj: Vec<Vec<(u32, S)>> = (0..g.n())
            .map(|v| g.neighbors(v).iter().map(|&u| (u, S::one())).collect())
            .collect();
        Self::from_sorted_adjacency(adj)
    }

    /// Builds from `(u, v, w)` triples. Rejects self-loops, duplicates and
    /// negative or non-finite weights.
    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, S)]) -> Result<Self> {
        let mut adj: Vec<Vec<(u32, S)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { v: u });
            }
            if !(w.is_finite() && w >= S::zero()) {
                return Err(Error::Parameter(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            adj[u].push((v as u32, w));
            adj[v].push((u as u32, w));
        }
        for (v, row) in adj.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                let other = w[0].0 as usize;
                return Err(Error::DuplicateEdge { u: v.min(other), v: v.max(other) });
            }
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    pub fn from_edge_list(list: &EdgeList) -> Result<Self> {
        let edges: Vec<(usize, usize, S)> = list.edges.iter().map(|&(u, v, w)| (u, v, S::of(w))).collect();
        Self::from_weighted_edges(list.n, &edges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let list = if trimmed.starts_with('{') { EdgeList::parse_json(text)? } else { EdgeList::parse_text(text)? };
        Self::from_edge_list(&list)
    }

    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<(u32, S)>>) -> Self {
        let n = adj.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let total: usize = adj.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut cumulative = Vec::with_capacity(total);
        let mut strength = Vec::with_capacity(n);
        let mut unit = true;
        for row in adj {
            let mut acc = S::zero();
            for (t, w) in row {
                targets.push(t);
                weights.push(w);
                acc = acc + w;
                cumulative.push(acc);
                unit &= w == S::one();
            }
            strength.push(acc);
            offsets.push(targets.len());
        }
        Self { n, offsets, targets, weights, cumulative, strength, loops: vec![S::zero(); n], unit }
    }

    /// Sets per-vertex self-loop weights. A loop of weight `w` at `v` adds
    /// `w` to the strength of `v` and `w / strength(v)` to `P(v, v)`.
    pub fn with_loops(mut self, loops: Vec<S>) -> Result<Self> {
        if loops.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: loops.len() });
        }
        if let Some(w) = loops.iter().find(|w| !(w.is_finite() && **w >= S::zero())) {
            return Err(Error::Parameter(format!("invalid loop weight {w}")));
        }
        for ((s, old), new) in self.strength.iter_mut().zip(&self.loops).zip(&loops) {
            *s = *s - *old + *new;
        }
        self.unit &= loops.iter().all(|w| *w == S::zero());
        self.loops = loops;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (non-loop) edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// True when every edge has weight one and there are no loops.
    pub fn is_unit(&self) -> bool {
        self.unit
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn neighbor_weights(&self, v: usize) -> &[S] {
        &self.weights[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> S {
        if u == v {
            return self.loops[u];
        }
        match self.neighbors(u).binary_search(&(v as u32)) {
            Ok(i) => self.weights[self.offsets[u] + i],
            Err(_) => S::zero(),
        }
    }

    #[inline]
    pub fn strength(&self, v: usize) -> S {
        self.strength[v]
    }

    pub fn loop_weight(&self, v: usize) -> S {
        self.loops[v]
    }

    pub fn total_strength(&self) -> S {
        self.strength.iter().copied().sum()
    }

    /// Edges `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .zip(self.neighbor_weights(u))
                .filter(move |(&v, _)| u < v as usize)
                .map(move |(&v, &w)| (u, v as usize, w))
        })
    }

    /// Connectivity through positive-weight edges.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for (&v, &w) in self.neighbors(u).iter().zip(self.neighbor_weights(u)) {
                let v = v as usize;
                if w > S::zero() && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Draws a neighbour of `v` with probability proportional to the edge
    /// weight. Self-loops are never returned.
    #[inline]
    pub fn sample_neighbor<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> usize {
        let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
        debug_assert!(hi > lo, "vertex {v} has no neighbours");
        if self.unit {
            return self.targets[lo + rng.random_range(0..hi - lo)] as usize;
        }
        let cum = &self.cumulative[lo..hi];
        let total = cum[cum.len() - 1];
        let x = S::of(rng.random::<f64>()) * total;
        let mut i = cum.partition_point(|&c| c <= x);
        if i >= cum.len() {
            i = (0..cum.len()).rev().find(|&k| self.weights[lo + k] > S::zero()).unwrap_or(cum.len() - 1);
        }
        self.targets[lo + i] as usize
    }

    /// Dense transition matrix of the simple (or lazy) walk.
    pub fn transition_matrix(&self, lazy: bool) -> DenseMatrix<S> {
        let mut p = DenseMatrix::zeros(self.n);
        let half = S::of(0.5);
        for u in 0..self.n {
            let s = self.strength[u];
            if s == S::zero() {
                continue;
            }
            for (&v, &w) in self.neighbors(u).iter().zip(self.neighbor_weights(u)) {
                p.set(u, v as usize, w / s);
            }
            p.set(u, u, self.loops[u] / s);
        }
        if lazy {
            for u in 0..self.n {
                for v in 0..self.n {
                    let x = p.get(u, v) * half;
                    p.set(u, v, if u == v { x + half } else { x });
                }
            }
        }
        p
    }

    /// Contracts each block to a single vertex. Blocks get ids `0..b` in
    /// order; remaining vertices follow in increasing order. Intra-block
    /// edges and all self-loops are dropped; parallel edges are merged by
    /// summing their weights.
    pub fn contract(&self, blocks: &[VertexSet]) -> Result<ContractionMap<S>> {
        let mut block_of = vec![usize::MAX; self.n];
        for (b, block) in blocks.iter().enumerate() {
            if block.universe() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, found: block.universe() });
            }
            if block.is_empty() {
                return Err(Error::EmptySet);
            }
            for v in block.iter() {
                if block_of[v] != usize::MAX {
                    return Err(Error::OverlappingBlocks { v });
                }
                block_of[v] = b;
            }
        }
        let mut next = blocks.len();
        for slot in block_of.iter_mut() {
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
            }
        }
        Ok(ContractionMap::build(self, block_of))
    }
}

impl<S: Scalar> fmt::Debug for Network<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network").field("n", &self.n).field("edges", &self.edge_count()).finish()
    }
}

/// Result of contracting a network: the vertex map and the quotient.
#[derive(Clone)]
pub struct ContractionMap<S = f64> {
    source_n: usize,
    block_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    contracted: Network<S>,
}

impl<S: Scalar> fmt::Debug for ContractionMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContractionMap").field("block_of", &self.block_of).field("contracted", &self.contracted).finish()
    }
}

impl<S: Scalar> ContractionMap<S> {
    fn build(source: &Network<S>, block_of: Vec<usize>) -> Self {
        let k = block_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); k];
        for (v, &b) in block_of.iter().enumerate() {
            members[b].push(v);
        }
        // Accumulate each unordered pair once (from its smaller end) so the
        // merged weights are bitwise symmetric.
        let mut scratch = vec![S::zero(); k];
        let mut touched = Vec::new();
        let mut adj: Vec<Vec<(u32, S)>> = vec![Vec::new(); k];
        for a in 0..k {
            for &u in &members[a] {
                for (&v, &w) in source.neighbors(u).iter().zip(source.neighbor_weights(u)) {
                    let b = block_of[v as usize];
                    if b > a {
                        if scratch[b] == S::zero() {
                            touched.push(b);
                        }
                        scratch[b] = scratch[b] + w;
                    }
                }
            }
            touched.sort_unstable();
            for &b in &touched {
                let w = scratch[b];
                adj[a].push((b as u32, w));
                adj[b].push((a as u32, w));
                scratch[b] = S::zero();
            }
            touched.clear();
        }
        for row in adj.iter_mut() {
            row.sort_by_key(|e| e.0);
        }
        Self { source_n: source.n(), block_of, members, contracted: Network::from_sorted_adjacency(adj) }
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn contracted(&self) -> &Network<S> {
        &self.contracted
    }

    /// Contracted id of an original vertex.
    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn block_map(&self) -> &[usize] {
        &self.block_of
    }

    pub fn members(&self, a: usize) -> &[usize] {
        &self.members[a]
    }

    /// Applies `next` (a contraction of this map's quotient) after `self`.
    pub fn compose(&self, next: &ContractionMap<S>) -> Result<ContractionMap<S>> {
        if next.source_n != self.contracted.n() {
            return Err(Error::DimensionMismatch { expected: self.contracted.n(), found: next.source_n });
        }
        let block_of: Vec<usize> = self.block_of.iter().map(|&b| next.block_of[b]).collect();
        let k = next.contracted.n();
        let mut members = vec![Vec::new(); k];
        for (v, &b) in block_of.iter().enumerate() {
            members[b].push(v);
        }
        Ok(Self { source_n: self.source_n, block_of, members, contracted: next.contracted.clone() })
    }

    /// Original edges between contracted vertices `a` and `b`.
    pub fn preimage_edges(&self, source: &Network<S>, a: usize, b: usize) -> Vec<(usize, usize, S)> {
        let mut out = Vec::new();
        for &u in &self.members[a] {
            for (&v, &w) in source.neighbors(u).iter().zip(source.neighbor_weights(u)) {
                if self.block_of[v as usize] == b && w > S::zero() {
                    out.push((u.min(v as usize), u.max(v as usize), w));
                }
            }
        }
        out
    }

    /// Maps contracted tree edges back to original edges, choosing among
    /// parallel preimages with probability proportional to weight. This
    /// preserves the weighted spanning-tree law.
    pub fn lift_edges<R: Rng + ?Sized>(
        &self,
        source: &Network<S>,
        edges: &[(usize, usize)],
        rng: &mut R,
    ) -> Vec<(usize, usize)> {
        edges
            .iter()
            .map(|&(a, b)| {
                let pre = self.preimage_edges(source, a, b);
                let total: S = pre.iter().map(|e| e.2).sum();
                let mut x = S::of(rng.random::<f64>()) * total;
                for &(u, v, w) in &pre {
                    if x < w {
                        return (u, v);
                    }
                    x = x - w;
                }
                let last = pre.last().expect("contracted edge has a preimage");
                (last.0, last.1)
            })
            .collect()
    }
}

/// Adds a vertex `ρ = n` joined to every `v` with weight
/// `θε⁴·deg(v) / (√n − θε⁴)`, so a walk steps to `ρ` with probability
/// exactly `θε⁴/√n` from every original vertex.
pub fn augment_rho<S: Scalar>(g: &Graph, theta: f64, eps: f64) -> Result<Network<S>> {
    let n = g.n();
    let x = theta * eps.powi(4);
    let root = (n as f64).sqrt();
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Parameter(format!("θε⁴ = {x} must be finite and nonnegative")));
    }
    if x >= root {
        return Err(Error::Parameter(format!("θε⁴ = {x} must be below √n = {root}")));
    }
    let mut adj: Vec<Vec<(u32, S)>> = Vec::with_capacity(n + 1);
    let mut rho_row = Vec::with_capacity(n);
    for v in 0..n {
        let mut row: Vec<(u32, S)> = g.neighbors(v).iter().map(|&u| (u, S::one())).collect();
        let w = S::of(x * g.degree(v) as f64 / (root - x));
        row.push((n as u32, w));
        rho_row.push((v as u32, w));
        adj.push(row);
    }
    adj.push(rho_row);
    Ok(Network::from_sorted_adjacency(adj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, vs.iter().copied()).unwrap()
    }

    #[test]
    fn contract_pair_in_k4() {
        let net: Network = Network::from_graph(&complete(4));
        let map = net.contract(&[set(4, &[0, 1])]).unwrap();
        let c = map.contracted();
        assert_eq!(c.n(), 3);
        assert_eq!(c.weight(0, 1), 2.0);
        assert_eq!(c.weight(0, 2), 2.0);
        assert_eq!(c.weight(1, 2), 1.0);
        assert_eq!(map.block_map(), &[0, 0, 1, 2]);
    }

    #[test]
    fn contract_everything_and_singletons() {
        let net: Network = Network::from_graph(&complete(5));
        let all = net.contract(&[VertexSet::full(5)]).unwrap();
        assert_eq!(all.contracted().n(), 1);
        assert_eq!(all.contracted().edge_count(), 0);

        let single = net.contract(&[set(5, &[3])]).unwrap();
        let c = single.contracted();
        assert_eq!(c.n(), 5);
        assert_eq!(c.edge_count(), 10);
        // vertex 3 moved to id 0; the rest keep relative order
        assert_eq!(single.block_map(), &[1, 2, 3, 0, 4]);
        for u in 0..5 {
            for v in 0..5 {
                if u != v {
                    assert_eq!(c.weight(single.block_of(u), single.block_of(v)), 1.0);
                }
            }
        }
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        let net: Network = Network::from_graph(&complete(4));
        let err = net.contract(&[set(4, &[0, 1]), set(4, &[1, 2])]).unwrap_err();
        assert!(matches!(err, Error::OverlappingBlocks { v: 1 }));
    }

    #[test]
    fn handshake_for_networks() {
        let net: Network = Network::from_weighted_edges(4, &[(0, 1, 0.5), (1, 2, 2.0), (2, 3, 1.5), (0, 3, 1.0)]).unwrap();
        let total: f64 = net.edges().map(|e| e.2).sum();
        assert!((net.total_strength() - 2.0 * total).abs() < 1e-12);
    }

    #[test]
    fn rho_weights_give_exact_step_probability() {
        let g = complete(4);
        let net: Network = augment_rho(&g, 1.0, 1.0).unwrap();
        // K4, θε⁴ = 1: w(v,ρ) = 3/(2-1) = 3, step prob 3/6 = 1/2.
        for v in 0..4 {
            assert_eq!(net.weight(v, 4), 3.0);
            assert!((net.weight(v, 4) / net.strength(v) - 0.5).abs() < 1e-12);
        }
        assert!(matches!(augment_rho::<f64>(&g, 2.0, 1.0), Err(Error::Parameter(_))));
        let tiny: Network = augment_rho(&g, 1e-12, 0.5).unwrap();
        assert!(tiny.weight(0, 4) < 1e-12);
    }

    #[test]
    fn lifting_picks_a_real_preimage() {
        let src: Network = Network::from_graph(&complete(4));
        let map = src.contract(&[set(4, &[0, 1])]).unwrap();
        let mut rng = RngStream::new(3);
        for _ in 0..20 {
            let lifted = map.lift_edges(&src, &[(0, 1), (1, 2)], &mut rng);
            assert!(lifted[0] == (0, 2) || lifted[0] == (1, 2));
            assert_eq!(lifted[1], (2, 3));
        }
    }
}
