//! Simple undirected graphs, vertex sets and edge-list I/O.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graphs up to this size carry an adjacency bitmap for O(1) edge tests.
pub const BITMAP_LIMIT: usize = 4096;

/// Membership bitmap over `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    bits: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        Self { universe, bits: vec![0; universe.div_ceil(64)], len: 0 }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(universe: usize, vertices: I) -> Result<Self> {
        let mut s = Self::empty(universe);
        for v in vertices {
            if v >= universe {
                return Err(Error::VertexOutOfRange { v, n: universe });
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.bits[v >> 6] >> (v & 63) & 1 == 1
    }

    /// Returns true if `v` was newly inserted.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let (w, b) = (v >> 6, 1u64 << (v & 63));
        if self.bits[w] & b == 0 {
            self.bits[w] |= b;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if !self.contains(v) {
            return false;
        }
        self.bits[v >> 6] &= !(1u64 << (v & 63));
        self.len -= 1;
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let t = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut c = Self::empty(self.universe);
        for v in 0..self.universe {
            if !self.contains(v) {
                c.insert(v);
            }
        }
        c
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for v in other.iter() {
            out.insert(v);
        }
        out
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A simple undirected graph on vertices `0..n` in compressed adjacency form.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    m: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    bitmap: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { v: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { v: u });
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v as u32;
            fill[u] += 1;
            targets[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..n {
            let row = &mut targets[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (v.min(w[0] as usize), v.max(w[0] as usize));
                return Err(Error::DuplicateEdge { u: a, v: b });
            }
        }
        Ok(Self::from_parts(n, offsets, targets))
    }

    /// Builds from per-vertex neighbour lists that already satisfy the
    /// invariants (sorted, symmetric, loop-free).
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<u32>>) -> Self {
        let n = adj.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for row in adj {
            debug_assert!(row.windows(2).all(|w| w[0] < w[1]));
            targets.extend(row);
            offsets.push(targets.len());
        }
        Self::from_parts(n, offsets, targets)
    }

    fn from_parts(n: usize, offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        let m = targets.len() / 2;
        let bitmap = (n <= BITMAP_LIMIT).then(|| {
            let words = n.div_ceil(64);
            let mut bits = vec![0u64; n * words];
            for u in 0..n {
                for &v in &targets[offsets[u]..offsets[u + 1]] {
                    let v = v as usize;
                    bits[u * words + (v >> 6)] |= 1 << (v & 63);
                }
            }
            bits
        });
        Self { n, m, offsets, targets, bitmap }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        match &self.bitmap {
            Some(bits) => {
                let words = self.n.div_ceil(64);
                bits[u * words + (v >> 6)] >> (v & 63) & 1 == 1
            }
            None => self.neighbors(u).binary_search(&(v as u32)).is_ok(),
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u).iter().map(|&v| v as usize).filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Number of edges from `v` into `s`.
    pub fn deg_into(&self, v: usize, s: &VertexSet) -> usize {
        self.neighbors(v).iter().filter(|&&u| s.contains(u as usize)).count()
    }

    /// `|∂S|`: edges with exactly one endpoint in `s`.
    pub fn edge_boundary(&self, s: &VertexSet) -> usize {
        s.iter().map(|v| self.degree(v) - self.deg_into(v, s)).sum()
    }

    /// Edges with one endpoint in `s` and the other in `t`.
    pub fn cut_count(&self, s: &VertexSet, t: &VertexSet) -> usize {
        s.iter().map(|v| self.deg_into(v, t)).sum()
    }

    /// Sum of degrees over `s`.
    pub fn volume(&self, s: &VertexSet) -> usize {
        s.iter().map(|v| self.degree(v)).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    let v = v as usize;
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Breadth-first distances from `source` (`usize::MAX` when unreachable).
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Induced subgraph on `s`, relabelled `0..|s|` in increasing vertex
    /// order. The second value maps new ids back to the original ones.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let remap: Vec<usize> = s.iter().collect();
        let mut new_id = vec![u32::MAX; self.n];
        for (i, &v) in remap.iter().enumerate() {
            new_id[v] = i as u32;
        }
        let adj = remap
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&u| (new_id[u as usize] != u32::MAX).then_some(new_id[u as usize]))
                    .collect()
            })
            .collect();
        Ok((Graph::from_sorted_adjacency(adj), remap))
    }

    /// Parses the text edge-list format. Lines after the header are
    /// `u v` or `u v w`; a weight other than 1 is rejected for graphs.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let list = EdgeList::parse_text(text)?;
        list.into_graph()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        EdgeList::parse_json(text)?.into_graph()
    }

    /// Like [`Graph::from_edge_list`] but fails on a disconnected input.
    pub fn from_edge_list_connected(text: &str) -> Result<Self> {
        let g = Self::from_edge_list(text)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = EdgeListDoc {
            n: self.n,
            edges: self.edges().map(|(u, v)| EdgeEntry::Unit(u, v)).collect(),
        };
        serde_json::to_string(&doc).expect("edge list serialises")
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("m", &self.m).finish()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.offsets == other.offsets && self.targets == other.targets
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeListDoc {
    n: usize,
    edges: Vec<EdgeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeEntry {
    Weighted(usize, usize, f64),
    Unit(usize, usize),
}

/// A parsed edge list with optional weights, shared by the graph and
/// network loaders.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::Parse { line: hline, message: "header must be `n m`".into() });
        }
        let n = parse_num::<usize>(head[0], hline)?;
        let m = parse_num::<usize>(head[1], hline)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let (u, v, w) = match parts.as_slice() {
                [u, v] => (parse_num(u, line)?, parse_num(v, line)?, 1.0),
                [u, v, w] => (parse_num(u, line)?, parse_num(v, line)?, parse_num::<f64>(w, line)?),
                _ => return Err(Error::Parse { line, message: "expected `u v` or `u v w`".into() }),
            };
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Parse { line, message: format!("weight {w} must be finite and nonnegative") });
            }
            if u >= n || v >= n {
                return Err(Error::Parse { line, message: format!("vertex id out of range for n = {n}") });
            }
            if u == v {
                return Err(Error::SelfLoop { v: u });
            }
            edges.push((u, v, w));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hline,
                message: format!("header declares {m} edges but {} were given", edges.len()),
            });
        }
        Ok(Self { n, edges })
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: EdgeListDoc = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let edges = doc
            .edges
            .into_iter()
            .map(|e| match e {
                EdgeEntry::Unit(u, v) => (u, v, 1.0),
                EdgeEntry::Weighted(u, v, w) => (u, v, w),
            })
            .collect::<Vec<_>>();
        for &(u, v, w) in &edges {
            if u >= doc.n || v >= doc.n {
                return Err(Error::VertexOutOfRange { v: u.max(v), n: doc.n });
            }
            if u == v {
                return Err(Error::SelfLoop { v: u });
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Parameter(format!("weight {w} must be finite and nonnegative")));
            }
        }
        Ok(Self { n: doc.n, edges })
    }

    pub fn into_graph(self) -> Result<Graph> {
        if let Some(&(u, v, w)) = self.edges.iter().find(|e| e.2 != 1.0) {
            return Err(Error::Parameter(format!("edge ({u}, {v}) has weight {w}; graphs are unweighted")));
        }
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v, _)| (u, v)).collect();
        Graph::from_edges(self.n, &pairs)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("cannot parse `{s}`") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, vs.iter().copied()).unwrap()
    }

    #[test]
    fn loads_triangle_and_k2() {
        let g = Graph::from_edge_list("3 3\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(g, complete(3));
        let k2 = Graph::from_edge_list("2 1\n0 1\n").unwrap();
        assert_eq!((k2.n(), k2.m()), (2, 1));
    }

    #[test]
    fn rejects_self_loop_and_duplicates() {
        assert!(matches!(Graph::from_edge_list("2 1\n0 0\n"), Err(Error::SelfLoop { v: 0 })));
        assert!(matches!(
            Graph::from_edge_list("2 2\n0 1\n1 0\n"),
            Err(Error::DuplicateEdge { u: 0, v: 1 })
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Graph::from_edge_list("3 2\n0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Graph::from_edge_list("3 3\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Graph::from_edge_list("2 1\n0 1 2.5\n"), Err(Error::Parameter(_))));
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let g = complete(4);
        let text = g.to_json();
        let back = Graph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
        let w = EdgeList::parse_json(r#"{"n":3,"edges":[[0,1],[1,2,2.5]]}"#).unwrap();
        assert_eq!(w.edges, vec![(0, 1, 1.0), (1, 2, 2.5)]);
        assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn connectivity_is_checked_on_request() {
        let text = "4 2\n0 1\n2 3\n";
        assert!(Graph::from_edge_list(text).is_ok());
        assert!(matches!(Graph::from_edge_list_connected(text), Err(Error::Disconnected)));
    }

    #[test]
    fn induced_subgraphs() {
        let (k3, remap) = complete(4).induced_subgraph(&set(4, &[0, 1, 2])).unwrap();
        assert_eq!(k3, complete(3));
        assert_eq!(remap, vec![0, 1, 2]);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (iso, _) = path.induced_subgraph(&set(3, &[0, 2])).unwrap();
        assert_eq!((iso.n(), iso.m()), (2, 0));

        // every 4-subset of K6 induces K4: C(4,2) = 6 edges.
        let k6 = complete(6);
        for mask in 0u32..64 {
            if mask.count_ones() != 4 {
                continue;
            }
            let s = set(6, &(0..6).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
            let (h, _) = k6.induced_subgraph(&s).unwrap();
            assert_eq!(h.m(), 6);
        }
        assert!(matches!(k6.induced_subgraph(&VertexSet::empty(6)), Err(Error::EmptySet)));
    }

    #[test]
    fn boundary_and_volume_counts() {
        for n in 2..8 {
            let g = complete(n);
            let s = set(n, &[0]);
            assert_eq!(g.edge_boundary(&s), n - 1);
            assert_eq!(g.volume(&s), n - 1);
        }
        let k4 = complete(4);
        for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            let s = set(4, &[a, b]);
            assert_eq!(k4.edge_boundary(&s), 4);
            assert_eq!(k4.volume(&s), 6);
        }
        // two disjoint triangles
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g.cut_count(&set(6, &[0, 1, 2]), &set(6, &[3, 4, 5])), 0);
        assert_eq!(g.min_degree(), 2);
        assert_eq!(g.deg_into(0, &set(6, &[1, 2, 3])), 2);
    }

    #[test]
    fn vertex_set_operations() {
        let mut s = VertexSet::empty(130);
        assert!(s.insert(129));
        assert!(!s.insert(129));
        s.insert(3);
        assert_eq!(s.to_vec(), vec![3, 129]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.complement().len(), 128);
        assert!(s.remove(3));
        assert!(!s.contains(3));
    }
}
