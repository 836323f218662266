//! Vertex partitions and their block-quotient graphs.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// A labelling of `0..n` into `k` nonempty disjoint blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<VertexSet>,
}

impl Partition {
    /// From a block label per vertex. Labels must use every id in `0..k`.
    pub fn from_labels(block_of: Vec<usize>) -> Result<Self> {
        let n = block_of.len();
        let k = block_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![VertexSet::empty(n); k];
        for (v, &b) in block_of.iter().enumerate() {
            blocks[b].insert(v);
        }
        if let Some(i) = blocks.iter().position(VertexSet::is_empty) {
            return Err(Error::InvalidPartition(format!("block {i} is empty")));
        }
        Ok(Self { block_of, blocks })
    }

    /// From explicit blocks; they must be nonempty, disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &v in block {
                if v >= n {
                    return Err(Error::VertexOutOfRange { v, n });
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::OverlappingBlocks { v });
                }
                block_of[v] = b;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        Self::from_labels(block_of)
    }

    pub fn from_sets(n: usize, sets: &[VertexSet]) -> Result<Self> {
        let blocks: Vec<Vec<usize>> = sets.iter().map(VertexSet::to_vec).collect();
        Self::from_blocks(n, &blocks)
    }

    pub fn trivial(n: usize) -> Self {
        Self { block_of: vec![0; n], blocks: vec![VertexSet::full(n)] }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels((0..n).collect()).expect("singletons are a partition")
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block(&self, i: usize) -> &VertexSet {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(VertexSet::len).collect()
    }

    /// Relabels blocks by their smallest vertex so equal partitions compare equal.
    pub fn canonical(&self) -> Self {
        let mut order: Vec<usize> = (0..self.k()).collect();
        order.sort_by_key(|&b| self.blocks[b].iter().next());
        let mut relabel = vec![0; self.k()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        Self::from_labels(self.block_of.iter().map(|&b| relabel[b]).collect()).expect("relabelling keeps blocks")
    }

    /// Merges groups of blocks: `groups[j]` lists the old block ids forming
    /// new block `j`.
    pub fn merge(&self, groups: &[Vec<usize>]) -> Result<Self> {
        let mut relabel = vec![usize::MAX; self.k()];
        for (j, group) in groups.iter().enumerate() {
            for &b in group {
                if b >= self.k() || relabel[b] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("block {b} is missing or repeated in the merge")));
                }
                relabel[b] = j;
            }
        }
        if relabel.contains(&usize::MAX) {
            return Err(Error::InvalidPartition("merge does not cover every block".into()));
        }
        Self::from_labels(self.block_of.iter().map(|&b| relabel[b]).collect())
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<Vec<usize>> = self.blocks.iter().map(VertexSet::to_vec).collect();
        blocks.serialize(s)
    }
}

/// `counts[i][j] = |E(V_i, V_j)|` for `i ≠ j`; the diagonal holds internal edge counts.
pub fn crossing_counts(g: &Graph, p: &Partition) -> Vec<Vec<usize>> {
    let k = p.k();
    let mut counts = vec![vec![0; k]; k];
    for (u, v) in g.edges() {
        let (a, b) = (p.block_of(u), p.block_of(v));
        counts[a][b] += 1;
        if a != b {
            counts[b][a] += 1;
        }
    }
    counts
}

/// The block graph joining `i` and `j` when more than `c` edges cross between them.
pub fn h_graph(g: &Graph, p: &Partition, c: f64) -> Graph {
    let counts = crossing_counts(g, p);
    let k = p.k();
    let adj: Vec<Vec<u32>> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && counts[i][j] as f64 > c).map(|j| j as u32).collect())
        .collect();
    Graph::from_sorted_adjacency(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques_bridge(h: usize) -> Graph {
        let mut edges = Vec::new();
        for base in [0, h] {
            for u in 0..h {
                for v in u + 1..h {
                    edges.push((base + u, base + v));
                }
            }
        }
        edges.push((h - 1, h));
        Graph::from_edges(2 * h, &edges).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Partition::from_blocks(4, &[vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(Partition::from_blocks(4, &[vec![0, 1], vec![2]]).is_err());
        assert!(Partition::from_labels(vec![0, 2, 2]).is_err());
        let p = Partition::from_blocks(4, &[vec![3, 1], vec![0, 2]]).unwrap();
        assert_eq!(p.sizes(), vec![2, 2]);
        assert_eq!(p.canonical().labels(), &[0, 1, 0, 1]);
    }

    #[test]
    fn h_graph_examples() {
        let g = two_cliques_bridge(5);
        let p = Partition::from_blocks(10, &[(0..5).collect(), (5..10).collect()]).unwrap();
        assert_eq!(h_graph(&g, &p, 0.0).m(), 1);
        assert_eq!(h_graph(&g, &p, 1.0).m(), 0);
        assert_eq!(h_graph(&g, &p, -1.0).m(), 1);
        assert_eq!(h_graph(&g, &p, 100.0).m(), 0);
    }

    #[test]
    fn merging_blocks() {
        let p = Partition::singletons(4);
        let q = p.merge(&[vec![0, 3], vec![1], vec![2]]).unwrap();
        assert_eq!(q.labels(), &[0, 1, 2, 0]);
        assert!(p.merge(&[vec![0, 1]]).is_err());
    }
}
