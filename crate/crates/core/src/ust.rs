//! Loop erasure, Wilson's algorithm and spanning-tree queries.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::network::Network;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::walk::WalkTrace;

/// Exact tree counts are limited to this many vertices.
pub const COUNT_LIMIT: usize = 64;

/// A self-avoiding path obtained by erasing loops from a walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopErasedPath {
    pub vertices: Vec<usize>,
    pub source_seed: Option<u64>,
}

impl LoopErasedPath {
    /// Number of edges on the path.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }
}

/// Loop erasure of a vertex sequence via the last-visit recursion:
/// `LE_0 = X_0`, `s_i = max{t : X_t = LE_i}`, `LE_{i+1} = X_{s_i + 1}`.
pub fn loop_erase(xs: &[usize]) -> LoopErasedPath {
    if xs.is_empty() {
        return LoopErasedPath { vertices: Vec::new(), source_seed: None };
    }
    let mut last = HashMap::with_capacity(xs.len());
    for (t, &x) in xs.iter().enumerate() {
        last.insert(x, t);
    }
    let end = xs.len() - 1;
    let mut out = vec![xs[0]];
    let mut s = last[&xs[0]];
    while s < end {
        let next = xs[s + 1];
        out.push(next);
        s = last[&next];
    }
    LoopErasedPath { vertices: out, source_seed: None }
}

pub fn loop_erase_trace(trace: &WalkTrace) -> LoopErasedPath {
    LoopErasedPath { source_seed: Some(trace.seed), ..loop_erase(&trace.vertices) }
}

/// Chronological loop erasure maintained online: a stack of the current
/// erased path plus the stack position of each vertex on it.
pub(crate) struct OnlineEraser {
    stack: Vec<usize>,
    pos: Vec<u32>,
}

const NOT_ON_STACK: u32 = u32::MAX;

impl OnlineEraser {
    pub(crate) fn new(n: usize) -> Self {
        Self { stack: Vec::new(), pos: vec![NOT_ON_STACK; n] }
    }

    pub(crate) fn start(&mut self, v: usize) {
        self.clear();
        self.push(v);
    }

    #[inline]
    pub(crate) fn push(&mut self, v: usize) {
        let p = self.pos[v];
        if p != NOT_ON_STACK {
            for &u in &self.stack[p as usize + 1..] {
                self.pos[u] = NOT_ON_STACK;
            }
            self.stack.truncate(p as usize + 1);
        } else {
            self.pos[v] = self.stack.len() as u32;
            self.stack.push(v);
        }
    }

    pub(crate) fn path(&self) -> &[usize] {
        &self.stack
    }

    pub(crate) fn clear(&mut self) {
        for &u in &self.stack {
            self.pos[u] = NOT_ON_STACK;
        }
        self.stack.clear();
    }
}

/// A rooted spanning tree stored as a parent array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<Option<usize>>,
}

impl SpanningTree {
    /// Builds from a parent array. Exactly one entry (the root) is `None`;
    /// following parents from any vertex must reach the root.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidPath(format!("parent array has {} roots", roots.len())));
        }
        let tree = Self { root: roots[0], parent };
        for v in 0..n {
            if let Some(p) = tree.parent[v] {
                if p >= n {
                    return Err(Error::VertexOutOfRange { v: p, n });
                }
            }
        }
        // every vertex reaches the root in fewer than n hops
        let mut state = vec![0u8; n];
        state[tree.root] = 2;
        for v in 0..n {
            let mut chain = Vec::new();
            let mut x = v;
            while state[x] == 0 {
                state[x] = 1;
                chain.push(x);
                x = tree.parent[x].expect("non-root has a parent");
            }
            if state[x] == 1 {
                return Err(Error::InvalidPath("parent array contains a cycle".into()));
            }
            for u in chain {
                state[u] = 2;
            }
        }
        Ok(tree)
    }

    /// Builds a tree from `n − 1` undirected edges, rooted at 0.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidPath(format!("{} edges cannot span {n} vertices", edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { v: u.max(v), n });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        if count != n {
            return Err(Error::InvalidPath("edges do not connect every vertex".into()));
        }
        Ok(Self { root: 0, parent })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Edges as `(min, max)` pairs in vertex order of the child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).filter_map(|v| self.parent[v].map(|p| (v.min(p), v.max(p)))).collect()
    }

    /// Sorted edge list; equal for equal trees regardless of root.
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let mut e = self.edges();
        e.sort_unstable();
        e
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.parent[u] == Some(v) || self.parent[v] == Some(u)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (u, v) in self.edges() {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Checks the tree invariants against a network: `n − 1` edges, each
    /// present with positive weight, spanning and acyclic.
    pub fn validate<S: Scalar>(&self, net: &Network<S>) -> Result<()> {
        if self.n() != net.n() {
            return Err(Error::DimensionMismatch { expected: net.n(), found: self.n() });
        }
        for (u, v) in self.edges() {
            if net.weight(u, v) <= S::zero() {
                return Err(Error::InvalidPath(format!("tree edge ({u}, {v}) is not an edge of the network")));
            }
        }
        Self::from_parents(self.parent.clone()).map(|_| ())
    }

    /// The unique tree path from `u` to `v`.
    pub fn path(&self, u: usize, v: usize) -> LoopErasedPath {
        let n = self.n();
        let mut on_u_side = vec![usize::MAX; n];
        let mut up = Vec::new();
        let mut x = u;
        loop {
            on_u_side[x] = up.len();
            up.push(x);
            match self.parent[x] {
                Some(p) => x = p,
                None => break,
            }
        }
        let mut down = Vec::new();
        let mut y = v;
        while on_u_side[y] == usize::MAX {
            down.push(y);
            y = self.parent[y].expect("root is on u's ancestor chain");
        }
        up.truncate(on_u_side[y] + 1);
        up.extend(down.into_iter().rev());
        LoopErasedPath { vertices: up, source_seed: None }
    }

    fn farthest(adj: &[Vec<usize>], source: usize) -> (usize, usize) {
        let mut dist = vec![usize::MAX; adj.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        let mut best = (source, 0);
        while let Some(u) = queue.pop_front() {
            if dist[u] > best.1 {
                best = (u, dist[u]);
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        best
    }

    /// Diameter by double sweep, exact on trees.
    pub fn diameter(&self) -> usize {
        let adj = self.adjacency();
        let (a, _) = Self::farthest(&adj, self.root);
        Self::farthest(&adj, a).1
    }

    /// Diameter by a traversal from every vertex.
    pub fn diameter_all_pairs(&self) -> usize {
        let adj = self.adjacency();
        (0..self.n()).map(|s| Self::farthest(&adj, s).1).max().unwrap_or(0)
    }

    /// Parent-array JSON: `{"root": r, "parent": [p0, p1, …]}` with `null` at the root.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree serialises")
    }
}

/// Wilson's algorithm bound to a connected network. Connectivity is checked
/// once at construction so repeated sampling does not pay for it.
pub struct WilsonSampler<'a, S = f64> {
    net: &'a Network<S>,
    step_cap: Option<u64>,
}

/// One loop-erased walk attached to the growing tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LerwRecord {
    pub start: usize,
    /// From `start` to the first tree vertex hit, inclusive.
    pub path: LoopErasedPath,
    /// Length of the walk before erasure.
    pub raw_steps: u64,
}

impl<'a, S: Scalar> WilsonSampler<'a, S> {
    pub fn new(net: &'a Network<S>) -> Result<Self> {
        if net.n() == 0 {
            return Err(Error::EmptySet);
        }
        if !net.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(Self { net, step_cap: None })
    }

    /// Fails with a budget error once the total number of walk steps in one
    /// sample exceeds `cap`.
    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = Some(cap);
        self
    }

    /// Samples with the default ordering: a seeded random permutation whose
    /// first vertex is the root.
    pub fn sample(&self, rng: &mut RngStream) -> Result<SpanningTree> {
        let mut order: Vec<usize> = (0..self.net.n()).collect();
        order.shuffle(rng);
        self.sample_ordered(&order, rng)
    }

    pub fn sample_ordered(&self, ordering: &[usize], rng: &mut RngStream) -> Result<SpanningTree> {
        self.run(ordering, 0, rng).map(|(t, _)| t)
    }

    /// Runs the algorithm and keeps the walk records of the first `record`
    /// non-root vertices of the ordering.
    fn run<R: Rng + ?Sized>(&self, ordering: &[usize], record: usize, rng: &mut R) -> Result<(SpanningTree, Vec<LerwRecord>)> {
        let n = self.net.n();
        check_permutation(ordering, n)?;
        let mut in_tree = vec![false; n];
        let mut parent = vec![None; n];
        in_tree[ordering[0]] = true;
        let mut eraser = OnlineEraser::new(n);
        let mut records = Vec::with_capacity(record);
        let mut total_steps = 0u64;
        for (idx, &start) in ordering.iter().enumerate().skip(1) {
            if in_tree[start] {
                continue;
            }
            eraser.start(start);
            let mut v = start;
            let mut steps = 0u64;
            while !in_tree[v] {
                v = self.net.sample_neighbor(v, rng);
                eraser.push(v);
                steps += 1;
            }
            total_steps += steps;
            if let Some(cap) = self.step_cap {
                if total_steps > cap {
                    return Err(Error::BudgetExceeded { cap });
                }
            }
            let path = eraser.path();
            for w in path.windows(2) {
                parent[w[0]] = Some(w[1]);
                in_tree[w[0]] = true;
            }
            if idx <= record {
                records.push(LerwRecord {
                    start,
                    path: LoopErasedPath { vertices: path.to_vec(), source_seed: None },
                    raw_steps: steps,
                });
            }
        }
        Ok((SpanningTree { root: ordering[0], parent }, records))
    }
}

fn check_permutation(ordering: &[usize], n: usize) -> Result<()> {
    if ordering.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: ordering.len() });
    }
    let mut seen = vec![false; n];
    for &v in ordering {
        if v >= n {
            return Err(Error::VertexOutOfRange { v, n });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Parameter(format!("ordering repeats vertex {v}")));
        }
    }
    Ok(())
}

/// One weighted-UST sample with the default ordering.
pub fn wilson<S: Scalar>(net: &Network<S>, rng: &mut RngStream) -> Result<SpanningTree> {
    WilsonSampler::new(net)?.sample(rng)
}

/// One weighted-UST sample with a fixed ordering (first vertex is the root).
pub fn wilson_with_ordering<S: Scalar>(net: &Network<S>, ordering: &[usize], rng: &mut RngStream) -> Result<SpanningTree> {
    WilsonSampler::new(net)?.sample_ordered(ordering, rng)
}

/// Wilson's algorithm on an augmented network whose last vertex is `ρ`,
/// processing `ρ, first_vertices…` first and the rest in random order.
/// Returns the walk records of `first_vertices` in order; a record whose
/// start was already absorbed into the tree has an empty walk.
pub fn wilson_rooted_at_rho<S: Scalar>(
    net_rho: &Network<S>,
    first_vertices: &[usize],
    rng: &mut RngStream,
) -> Result<(SpanningTree, Vec<LerwRecord>)> {
    let n = net_rho.n();
    if n < 2 {
        return Err(Error::Parameter("augmented network needs at least two vertices".into()));
    }
    let rho = n - 1;
    let mut used = vec![false; n];
    used[rho] = true;
    let mut ordering = vec![rho];
    for &v in first_vertices {
        if v >= rho {
            return Err(Error::VertexOutOfRange { v, n: rho });
        }
        if std::mem::replace(&mut used[v], true) {
            return Err(Error::Parameter(format!("first vertex {v} repeated")));
        }
        ordering.push(v);
    }
    let mut rest: Vec<usize> = (0..rho).filter(|&v| !used[v]).collect();
    rest.shuffle(rng);
    ordering.extend(rest);
    let sampler = WilsonSampler::new(net_rho)?;
    let (tree, mut records) = sampler.run(&ordering, first_vertices.len(), rng)?;
    // fill in starts that were already in the tree when their turn came
    let mut out = Vec::with_capacity(first_vertices.len());
    for &v in first_vertices {
        match records.iter().position(|r| r.start == v) {
            Some(i) => out.push(records.swap_remove(i)),
            None => out.push(LerwRecord {
                start: v,
                path: LoopErasedPath { vertices: vec![v], source_seed: None },
                raw_steps: 0,
            }),
        }
    }
    Ok((tree, out))
}

/// Weighted spanning-tree total `Σ_T Π_{e∈T} w(e)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TreeCount {
    /// Exact, for integer weights.
    Exact(BigInt),
    /// Natural logarithm of the total, for general weights.
    Log(f64),
}

impl TreeCount {
    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            TreeCount::Exact(c) => Some(c),
            TreeCount::Log(_) => None,
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            TreeCount::Exact(c) if c.is_zero() => f64::NEG_INFINITY,
            TreeCount::Exact(c) => {
                let bits = c.bits();
                if bits < 1000 {
                    c.to_f64().expect("small integers convert").ln()
                } else {
                    let shift = bits - 64;
                    (c >> shift).to_f64().expect("shifted integer converts").ln() + shift as f64 * std::f64::consts::LN_2
                }
            }
            TreeCount::Log(x) => *x,
        }
    }
}

/// Kirchhoff's theorem: determinant of the reduced weighted Laplacian.
/// Integer-weighted networks use fraction-free elimination over big
/// integers; otherwise the log-determinant is returned.
pub fn spanning_tree_count<S: Scalar>(net: &Network<S>) -> Result<TreeCount> {
    let n = net.n();
    if n > COUNT_LIMIT {
        return Err(Error::SizeGuard { n, limit: COUNT_LIMIT, what: "spanning-tree count" });
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let integral = net.edges().all(|(_, _, w)| w.fract() == S::zero() && w.as_f64() < 2f64.powi(52));
    if integral {
        let mut lap = vec![vec![BigInt::zero(); n - 1]; n - 1];
        for (u, v, w) in net.edges() {
            let w = BigInt::from(w.as_f64() as i64);
            for (a, b) in [(u, v), (v, u)] {
                if a < n - 1 {
                    lap[a][a] += &w;
                    if b < n - 1 {
                        lap[a][b] -= &w;
                    }
                }
            }
        }
        return Ok(TreeCount::Exact(bareiss_det(lap)));
    }
    let m = n - 1;
    let mut lap = vec![0.0f64; m * m];
    for (u, v, w) in net.edges() {
        let w = w.as_f64();
        for (a, b) in [(u, v), (v, u)] {
            if a < m {
                lap[a * m + a] += w;
                if b < m {
                    lap[a * m + b] -= w;
                }
            }
        }
    }
    if m == 0 {
        return Ok(TreeCount::Log(0.0));
    }
    let eig = f64::symmetric_eigen(m, &lap, false)?;
    if eig.values.iter().any(|&x| x <= 0.0) {
        return Ok(TreeCount::Log(f64::NEG_INFINITY));
    }
    Ok(TreeCount::Log(eig.values.iter().map(|x| x.ln()).sum()))
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let m = a.len();
    if m == 0 {
        return BigInt::one();
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..m {
        if a[k][k].is_zero() {
            match (k + 1..m).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[m - 1][m - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Probability that the edge `(u, v)` lies in the weighted UST, as
/// `w(u,v) · τ(G/{u,v}) / τ(G)`.
pub fn edge_marginal<S: Scalar>(net: &Network<S>, u: usize, v: usize) -> Result<f64> {
    let w = net.weight(u, v).as_f64();
    if w == 0.0 {
        return Ok(0.0);
    }
    let whole = spanning_tree_count(net)?.ln();
    let merged = VertexSet::from_vertices(net.n(), [u, v])?;
    let contracted = net.contract(&[merged])?;
    let part = spanning_tree_count(contracted.contracted())?.ln();
    Ok(w * (part - whole).exp())
}

/// Every spanning tree of a small graph, as canonical edge lists.
pub fn enumerate_spanning_trees(g: &Graph) -> Result<Vec<Vec<(usize, usize)>>> {
    let n = g.n();
    if n > 12 || g.m() > 40 {
        return Err(Error::SizeGuard { n, limit: 12, what: "spanning-tree enumeration" });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let mut chosen = Vec::with_capacity(n - 1);
    enumerate_rec(&edges, 0, n, &mut chosen, &mut out);
    Ok(out)
}

fn enumerate_rec(edges: &[(usize, usize)], from: usize, n: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
    if chosen.len() == n - 1 {
        let picked: Vec<(usize, usize)> = chosen.iter().map(|&i| edges[i]).collect();
        if is_forest(n, &picked) {
            out.push(picked);
        }
        return;
    }
    let need = n - 1 - chosen.len();
    for i in from..edges.len() {
        if edges.len() - i < need {
            break;
        }
        chosen.push(i);
        let partial: Vec<(usize, usize)> = chosen.iter().map(|&j| edges[j]).collect();
        if is_forest(n, &partial) {
            enumerate_rec(edges, i + 1, n, chosen, out);
        }
        chosen.pop();
    }
}

fn is_forest(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut root, u), find(&mut root, v));
        if a == b {
            return false;
        }
        root[a] = b;
    }
    true
}

/// Per-edge inclusion frequencies of `UST(H) ∩ E(G)` against `UST(G)`.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeFrequency {
    pub u: usize,
    pub v: usize,
    /// Frequency of the edge in samples of `UST(H)`.
    pub in_h: f64,
    /// Frequency of the edge in samples of `UST(G)`.
    pub in_g: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub samples: usize,
    pub edges: Vec<EdgeFrequency>,
    /// Edges whose `H` frequency exceeds the `G` frequency by more than four
    /// standard errors.
    pub violations: Vec<(usize, usize)>,
}

/// Compares edge marginals of `UST(H)` restricted to `E(G)` and `UST(G)`.
/// `g` lives on the first `g.n()` vertices of `h` and every edge of `g`
/// must be an edge of `h`.
pub fn domination_probe(g: &Graph, h: &Graph, samples: usize, rng: &mut RngStream) -> Result<DominationReport> {
    if g.n() > h.n() {
        return Err(Error::Parameter("g has more vertices than h".into()));
    }
    if let Some((u, v)) = g.edges().find(|&(u, v)| !h.has_edge(u, v)) {
        return Err(Error::Parameter(format!("edge ({u}, {v}) of g is not in h")));
    }
    if samples == 0 {
        return Err(Error::Parameter("at least one sample is required".into()));
    }
    let (gn, hn) = (Network::<f64>::from_graph(g), Network::<f64>::from_graph(h));
    let (gs, hs) = (WilsonSampler::new(&gn)?, WilsonSampler::new(&hn)?);
    let g_edges: Vec<(usize, usize)> = g.edges().collect();
    let mut in_h = vec![0usize; g_edges.len()];
    let mut in_g = vec![0usize; g_edges.len()];
    for _ in 0..samples {
        let th = hs.sample(rng)?;
        let tg = gs.sample(rng)?;
        for (i, &(u, v)) in g_edges.iter().enumerate() {
            in_h[i] += th.contains_edge(u, v) as usize;
            in_g[i] += tg.contains_edge(u, v) as usize;
        }
    }
    let s = samples as f64;
    let mut edges = Vec::with_capacity(g_edges.len());
    let mut violations = Vec::new();
    for (i, &(u, v)) in g_edges.iter().enumerate() {
        let (ph, pg) = (in_h[i] as f64 / s, in_g[i] as f64 / s);
        let stderr = ((ph * (1.0 - ph) + pg * (1.0 - pg)) / s).sqrt();
        if ph - pg > 4.0 * stderr.max(1.0 / s) {
            violations.push((u, v));
        }
        edges.push(EdgeFrequency { u, v, in_h: ph, in_g: pg, stderr });
    }
    Ok(DominationReport { samples, edges, violations })
}

/// The two candidates with the largest scores; ties go to the smaller
/// vertex id. Used to pick path endpoints from stay-probability estimates.
pub fn select_endpoints(scores: &[(usize, f64)]) -> Option<(usize, usize)> {
    let mut sorted: Vec<(usize, f64)> = scores.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    match sorted.as_slice() {
        [a, b, ..] => Some((a.0, b.0)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn loop_erase_examples() {
        assert_eq!(loop_erase(&[0, 1, 0, 2]).vertices, vec![0, 2]);
        assert_eq!(loop_erase(&[3, 1, 4, 2]).vertices, vec![3, 1, 4, 2]);
        assert_eq!(loop_erase(&[0, 1, 0]).vertices, vec![0]);
        assert_eq!(loop_erase(&[0, 1, 2, 1, 3, 0, 4]).vertices, vec![0, 4]);
    }

    #[test]
    fn online_eraser_matches_recursion() {
        let xs = [5, 1, 2, 1, 3, 4, 3, 5, 6, 2, 7];
        let mut e = OnlineEraser::new(8);
        e.start(xs[0]);
        for &x in &xs[1..] {
            e.push(x);
        }
        assert_eq!(e.path(), loop_erase(&xs).vertices.as_slice());
    }

    #[test]
    fn tree_input_returns_itself() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let net = Network::<f64>::from_graph(&g);
        for seed in 0..20 {
            let t = wilson(&net, &mut RngStream::new(seed)).unwrap();
            assert_eq!(t.canonical_edges(), vec![(0, 1), (1, 2), (1, 3), (3, 4)]);
        }
    }

    #[test]
    fn path_and_diameter() {
        let path = SpanningTree::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(path.diameter(), 5);
        assert_eq!(path.path(4, 1).vertices, vec![4, 3, 2, 1]);
        let star = SpanningTree::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.diameter(), 2);
        assert_eq!(star.path(3, 3).vertices, vec![3]);
    }

    #[test]
    fn cayley_counts() {
        for (n, expected) in [(3, 3), (4, 16), (5, 125), (6, 1296)] {
            let net = Network::<f64>::from_graph(&complete(n));
            assert_eq!(spanning_tree_count(&net).unwrap().exact().unwrap(), &BigInt::from(expected));
            assert_eq!(enumerate_spanning_trees(&complete(n)).unwrap().len(), expected);
        }
        let tree = Network::<f64>::from_graph(&Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(spanning_tree_count(&tree).unwrap().exact().unwrap(), &BigInt::from(1));
        let too_big = Network::<f64>::from_graph(&complete(65));
        assert!(matches!(spanning_tree_count(&too_big), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn weighted_count_matches_enumeration() {
        // triangle with weights 1, 2, 3: trees are pairs, total 1·2 + 1·3 + 2·3 = 11
        let net = Network::<f64>::from_weighted_edges(3, &[(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        assert_eq!(spanning_tree_count(&net).unwrap().exact().unwrap(), &BigInt::from(11));
        let half = Network::<f64>::from_weighted_edges(3, &[(0, 1, 0.5), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let total = 0.5 * 2.0 + 0.5 * 3.0 + 2.0 * 3.0;
        assert!((spanning_tree_count(&half).unwrap().ln() - f64::ln(total)).abs() < 1e-12);
    }

    #[test]
    fn k4_edge_marginal() {
        let net = Network::<f64>::from_graph(&complete(4));
        // every edge lies in (n − 1)/m = 3/6 of the trees
        assert!((edge_marginal(&net, 0, 1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn endpoint_selection() {
        assert_eq!(select_endpoints(&[(3, 0.5), (1, 0.9), (2, 0.9)]), Some((1, 2)));
        assert_eq!(select_endpoints(&[(3, 0.5)]), None);
    }

    #[test]
    fn rejects_bad_ordering() {
        let net = Network::<f64>::from_graph(&complete(3));
        let mut rng = RngStream::new(0);
        assert!(wilson_with_ordering(&net, &[0, 1, 1], &mut rng).is_err());
        assert!(wilson_with_ordering(&net, &[0, 1], &mut rng).is_err());
    }
}
