//! Spectra of reversible walks, Dirichlet forms, block chains and the
//! spectral-gap lower bounds built from them.
//!
//! Tolerances: eigenvalue comparisons use [`Scalar::EIGEN_TOL`], stochastic
//! checks use [`Scalar::STOCHASTIC_TOL`], and every comparison of a lower
//! bound against an exact gap allows one-sided slack [`BOUND_SLACK`].

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::network::Network;
use crate::partition::{h_graph, Partition};
use crate::scalar::{DenseMatrix, Scalar};
use crate::walk::DENSE_LIMIT;

/// One-sided slack when asserting a bound against an exact gap.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    Simple,
    Lazy,
}

/// Eigenvalues of a reversible transition matrix and derived quantities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary<S = f64> {
    /// Descending.
    pub eigenvalues: Vec<S>,
    /// `1 − λ₂`; a one-state chain has gap 1.
    pub gap: S,
    pub trace_p2: S,
}

impl<S: Scalar> SpectralSummary<S> {
    pub fn lambda2(&self) -> Option<S> {
        self.eigenvalues.get(1).copied()
    }
}

fn check_dense<S: Scalar>(net: &Network<S>) -> Result<()> {
    if net.n() > DENSE_LIMIT {
        return Err(Error::SizeGuard { n: net.n(), limit: DENSE_LIMIT, what: "dense eigensolve" });
    }
    if net.n() == 0 {
        return Err(Error::EmptySet);
    }
    if !net.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// `D^{1/2} P D^{−1/2}` with `D = diag(strength)`: entries `w(u,v)/√(s_u s_v)`.
fn symmetrized<S: Scalar>(net: &Network<S>, mode: ChainMode) -> DenseMatrix<S> {
    let n = net.n();
    let root: Vec<S> = (0..n).map(|v| net.strength(v).sqrt()).collect();
    let mut a = DenseMatrix::zeros(n);
    for u in 0..n {
        for (&v, &w) in net.neighbors(u).iter().zip(net.neighbor_weights(u)) {
            a.set(u, v as usize, w / (root[u] * root[v as usize]));
        }
        let s = net.strength(u);
        a.set(u, u, if s == S::zero() { S::one() } else { net.loop_weight(u) / s });
    }
    if mode == ChainMode::Lazy {
        let half = S::of(0.5);
        for u in 0..n {
            for v in 0..n {
                let x = a.get(u, v) * half;
                a.set(u, v, if u == v { x + half } else { x });
            }
        }
    }
    a
}

fn summary_from_values<S: Scalar>(values: Vec<S>, trace_p2: S) -> SpectralSummary<S> {
    let gap = if values.len() < 2 { S::one() } else { S::one() - values[1] };
    SpectralSummary { eigenvalues: values, gap, trace_p2 }
}

/// Exact spectrum of the simple or lazy walk on a connected network.
pub fn spectrum<S: Scalar>(net: &Network<S>, mode: ChainMode) -> Result<SpectralSummary<S>> {
    check_dense(net)?;
    let a = symmetrized(net, mode);
    let eig = S::symmetric_eigen(net.n(), a.as_slice(), false)?;
    // trace(P²) = Σ_{u,v} P(u,v)P(v,u) = ‖A‖_F² for the symmetric A
    let trace_p2 = a.as_slice().iter().map(|&x| x * x).sum();
    Ok(summary_from_values(eig.values, trace_p2))
}

/// Eigenvalues with right eigenvectors `f` of `P` (`P f = λ f`), one per
/// entry, in descending eigenvalue order.
pub fn eigenpairs<S: Scalar>(net: &Network<S>, mode: ChainMode) -> Result<Vec<(S, Vec<S>)>> {
    check_dense(net)?;
    let n = net.n();
    let a = symmetrized(net, mode);
    let eig = S::symmetric_eigen(n, a.as_slice(), true)?;
    let vectors = eig.vectors.expect("vectors were requested");
    let inv_root: Vec<S> = (0..n).map(|v| S::one() / net.strength(v).sqrt()).collect();
    Ok(eig
        .values
        .iter()
        .enumerate()
        .map(|(j, &lambda)| (lambda, (0..n).map(|i| vectors[i * n + j] * inv_root[i]).collect()))
        .collect())
}

/// Spectrum of an arbitrary transition matrix reversible with respect to `pi`.
pub fn chain_spectrum<S: Scalar>(p: &DenseMatrix<S>, pi: &[S]) -> Result<SpectralSummary<S>> {
    let n = p.dim();
    if pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pi.len() });
    }
    if n > DENSE_LIMIT {
        return Err(Error::SizeGuard { n, limit: DENSE_LIMIT, what: "dense eigensolve" });
    }
    let root: Vec<S> = pi.iter().map(|x| x.sqrt()).collect();
    let mut a = DenseMatrix::zeros(n);
    for u in 0..n {
        for v in 0..n {
            let flow_uv = pi[u] * p.get(u, v);
            let flow_vu = pi[v] * p.get(v, u);
            let scale = S::one().max(pi[u].max(pi[v]));
            if (flow_uv - flow_vu).abs().as_f64() > 1e3 * S::STOCHASTIC_TOL * scale.as_f64() {
                return Err(Error::HypothesisViolation(format!("chain is not reversible at ({u}, {v})")));
            }
            if flow_uv != S::zero() || flow_vu != S::zero() {
                // symmetric entry √π_u P(u,v) / √π_v, averaged across the pair
                let avg = (flow_uv + flow_vu) * S::of(0.5);
                a.set(u, v, avg / (root[u] * root[v]));
            }
        }
    }
    let eig = S::symmetric_eigen(n, a.as_slice(), false)?;
    let trace_p2 = a.as_slice().iter().map(|&x| x * x).sum();
    Ok(summary_from_values(eig.values, trace_p2))
}

/// `ℰ(f) = ½ Σ_{x,y} π(x) P(x,y) (f(x) − f(y))²`. The lazy walk halves
/// every off-diagonal `P(x,y)` and so halves the form.
pub fn dirichlet_form<S: Scalar>(net: &Network<S>, f: &[S], mode: ChainMode) -> Result<S> {
    let n = net.n();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }
    let total = net.total_strength();
    let mut sum = S::zero();
    for x in 0..n {
        for (&y, &w) in net.neighbors(x).iter().zip(net.neighbor_weights(x)) {
            let d = f[x] - f[y as usize];
            sum = sum + w * d * d;
        }
    }
    let scale = if mode == ChainMode::Lazy { S::of(0.25) } else { S::of(0.5) };
    Ok(sum / total * scale)
}

/// Block-level chain of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionChain<S = f64> {
    pub p: DenseMatrix<S>,
    pub pi: Vec<S>,
}

/// Walk restricted to one block, holding in place instead of leaving.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionChain<S = f64> {
    pub block: usize,
    pub vertices: Vec<usize>,
    pub p: DenseMatrix<S>,
    pub pi: Vec<S>,
}

fn check_partition<S: Scalar>(net: &Network<S>, partition: &Partition) -> Result<()> {
    if partition.n() != net.n() {
        return Err(Error::DimensionMismatch { expected: net.n(), found: partition.n() });
    }
    Ok(())
}

/// `P̄(i,j) = (1/π̄(i)) Σ_{v∈V_i, u∈V_j} π(v) P(v,u)`.
pub fn projection_chain<S: Scalar>(net: &Network<S>, partition: &Partition) -> Result<ProjectionChain<S>> {
    check_partition(net, partition)?;
    let k = partition.k();
    let mut flow = DenseMatrix::zeros(k);
    let mut mass = vec![S::zero(); k];
    for v in 0..net.n() {
        let a = partition.block_of(v);
        mass[a] = mass[a] + net.strength(v);
        for (&u, &w) in net.neighbors(v).iter().zip(net.neighbor_weights(v)) {
            flow.add_to(a, partition.block_of(u as usize), w);
        }
        flow.add_to(a, a, net.loop_weight(v));
    }
    let total: S = mass.iter().copied().sum();
    let mut p = DenseMatrix::zeros(k);
    for (i, &mi) in mass.iter().enumerate() {
        if mi == S::zero() {
            return Err(Error::HypothesisViolation(format!("block {i} has zero stationary mass")));
        }
        for j in 0..k {
            p.set(i, j, flow.get(i, j) / mi);
        }
    }
    Ok(ProjectionChain { p, pi: mass.into_iter().map(|m| m / total).collect() })
}

/// `P_i(x,y) = P(x,y)` for `x ≠ y` in `V_i`; `P_i(x,x) = 1 − Σ_{w∈V_i∖{x}} P(x,w)`.
pub fn restriction_chain<S: Scalar>(net: &Network<S>, partition: &Partition, i: usize) -> Result<RestrictionChain<S>> {
    check_partition(net, partition)?;
    if i >= partition.k() {
        return Err(Error::InvalidPartition(format!("block {i} does not exist")));
    }
    let vertices = partition.block(i).to_vec();
    let m = vertices.len();
    let mut local = vec![usize::MAX; net.n()];
    for (j, &v) in vertices.iter().enumerate() {
        local[v] = j;
    }
    let mut p = DenseMatrix::zeros(m);
    let mut pi = Vec::with_capacity(m);
    for (x, &v) in vertices.iter().enumerate() {
        let s = net.strength(v);
        let mut off = S::zero();
        for (&u, &w) in net.neighbors(v).iter().zip(net.neighbor_weights(v)) {
            let y = local[u as usize];
            if y != usize::MAX {
                p.set(x, y, w / s);
                off = off + w / s;
            }
        }
        p.set(x, x, S::one() - off);
        pi.push(s);
    }
    let total: S = pi.iter().copied().sum();
    for x in pi.iter_mut() {
        *x = *x / total;
    }
    Ok(RestrictionChain { block: i, vertices, p, pi })
}

/// `min_i γ̄ γ_i / 6` over the projection chain gap `γ̄` and restriction
/// chain gaps `γ_i`. With a single block this is the plain gap.
pub fn jsvt_lower_bound<S: Scalar>(net: &Network<S>, partition: &Partition) -> Result<S> {
    check_partition(net, partition)?;
    if partition.k() == 1 {
        return Ok(spectrum(net, ChainMode::Simple)?.gap);
    }
    let proj = projection_chain(net, partition)?;
    let gbar = chain_spectrum(&proj.p, &proj.pi)?.gap;
    let mut best: Option<S> = None;
    for i in 0..partition.k() {
        let r = restriction_chain(net, partition, i)?;
        let gi = chain_spectrum(&r.p, &r.pi)?.gap;
        let b = gbar * gi / S::of(6.0);
        best = Some(best.map_or(b, |x| x.min(b)));
    }
    Ok(best.expect("at least two blocks").max(S::zero()))
}

/// `(1 − α) γ(P)` for a walk that holds at `v` with probability `p_v < α`.
pub fn lazy_vector_gap_bound(gap_p: f64, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("α = {alpha} must lie in [0, 1)")));
    }
    Ok((1.0 - alpha) * gap_p)
}

/// `Q = diag(p) + diag(1 − p) P` together with its stationary law
/// `π_Q(v) ∝ π(v) / (1 − p_v)`.
pub fn lazy_vector_chain<S: Scalar>(net: &Network<S>, p: &[S]) -> Result<(DenseMatrix<S>, Vec<S>)> {
    let n = net.n();
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    if let Some(x) = p.iter().find(|x| !(**x >= S::zero() && **x < S::one())) {
        return Err(Error::Parameter(format!("lazy-vector entry {x} is outside [0, 1)")));
    }
    let base = net.transition_matrix(false);
    let mut q = DenseMatrix::zeros(n);
    for (u, &pu) in p.iter().enumerate() {
        for v in 0..n {
            let x = (S::one() - pu) * base.get(u, v);
            q.set(u, v, if u == v { x + pu } else { x });
        }
    }
    let raw: Vec<S> = (0..n).map(|v| net.strength(v) / (S::one() - p[v])).collect();
    let total: S = raw.iter().copied().sum();
    Ok((q, raw.into_iter().map(|x| x / total).collect()))
}

/// Exact gap of the lazy-vector chain.
pub fn lazy_vector_chain_gap<S: Scalar>(net: &Network<S>, p: &[S]) -> Result<S> {
    check_dense(net)?;
    let (q, pi) = lazy_vector_chain(net, p)?;
    Ok(chain_spectrum(&q, &pi)?.gap)
}

/// A path (as a vertex sequence) for every ordered pair of distinct vertices.
#[derive(Clone, Debug, Default)]
pub struct PathFamily {
    paths: HashMap<(usize, usize), Vec<usize>>,
}

impl PathFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, path: Vec<usize>) -> Result<()> {
        let (&x, &y) = match (path.first(), path.last()) {
            (Some(x), Some(y)) if path.len() >= 2 => (x, y),
            _ => return Err(Error::InvalidPath("a path needs at least two vertices".into())),
        };
        self.paths.insert((x, y), path);
        Ok(())
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&[usize]> {
        self.paths.get(&(x, y)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// BFS shortest paths; neighbours are scanned in increasing order and
    /// the first discovery wins.
    pub fn bfs<S: Scalar>(net: &Network<S>) -> Self {
        let n = net.n();
        let mut paths = HashMap::with_capacity(n * n.saturating_sub(1));
        for x in 0..n {
            let parent = bfs_parents(net, x);
            for y in 0..n {
                if y == x || parent[y] == usize::MAX {
                    continue;
                }
                let mut path = vec![y];
                let mut v = y;
                while v != x {
                    v = parent[v];
                    path.push(v);
                }
                path.reverse();
                paths.insert((x, y), path);
            }
        }
        Self { paths }
    }
}

fn bfs_parents<S: Scalar>(net: &Network<S>, source: usize) -> Vec<usize> {
    let n = net.n();
    let mut parent = vec![usize::MAX; n];
    parent[source] = source;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for (&v, &w) in net.neighbors(u).iter().zip(net.neighbor_weights(u)) {
            let v = v as usize;
            if w > S::zero() && parent[v] == usize::MAX {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    parent
}

/// `1/B` with `B = max_e (1/Q(e)) Σ_{φ_{x,y} ∋ e} π(x) π(y) |φ_{x,y}|`
/// over directed edges `e`, where `Q(a,b) = π(a) P(a,b)`.
pub fn path_method_bound<S: Scalar>(net: &Network<S>, paths: &PathFamily) -> Result<S> {
    let n = net.n();
    if n < 2 {
        return Err(Error::Parameter("the path method needs at least two vertices".into()));
    }
    let pi = crate::walk::stationary(net)?;
    let pi = pi.probs();
    let total = net.total_strength();
    let mut base = Vec::with_capacity(n + 1);
    base.push(0);
    for v in 0..n {
        base.push(base[v] + net.degree(v));
    }
    let mut load = vec![S::zero(); base[n]];
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let path = paths
                .get(x, y)
                .ok_or_else(|| Error::InvalidPath(format!("no path supplied for ({x}, {y})")))?;
            if path[0] != x || path[path.len() - 1] != y {
                return Err(Error::InvalidPath(format!("path for ({x}, {y}) has wrong endpoints")));
            }
            let contribution = pi[x] * pi[y] * S::of((path.len() - 1) as f64);
            for e in path.windows(2) {
                let (a, b) = (e[0], e[1]);
                if a >= n || b >= n {
                    return Err(Error::VertexOutOfRange { v: a.max(b), n });
                }
                let slot = net
                    .neighbors(a)
                    .binary_search(&(b as u32))
                    .ok()
                    .filter(|&i| net.neighbor_weights(a)[i] > S::zero())
                    .ok_or_else(|| Error::InvalidPath(format!("({a}, {b}) has zero transition weight")))?;
                let idx = base[a] + slot;
                load[idx] = load[idx] + contribution;
            }
        }
    }
    let mut b_max = S::zero();
    for a in 0..n {
        for (slot, &w) in net.neighbor_weights(a).iter().enumerate() {
            let q = w / total;
            if w > S::zero() {
                b_max = b_max.max(load[base[a] + slot] / q);
            }
        }
    }
    Ok(S::one() / b_max)
}

/// Path bound with the default BFS family.
pub fn path_method_bound_bfs<S: Scalar>(net: &Network<S>) -> Result<S> {
    path_method_bound(net, &PathFamily::bfs(net))
}

/// Simple-walk gap of the subgraph induced by `s`; a single vertex has gap 1.
pub fn induced_gap(g: &Graph, s: &VertexSet) -> Result<f64> {
    let (sub, _) = g.induced_subgraph(s)?;
    if sub.n() == 1 {
        return Ok(1.0);
    }
    if !sub.is_connected() {
        return Ok(0.0);
    }
    Ok(spectrum(&Network::<f64>::from_graph(&sub), ChainMode::Simple)?.gap)
}

/// `min{a, abc/(6kn³)}` after checking that every block induces gap at
/// least `a`, every vertex has at least `b` neighbours in its own block and
/// the block graph joining blocks with more than `c` crossing edges is connected.
pub fn decomposition_gap_bound(g: &Graph, partition: &Partition, a: f64, b: f64, c: f64) -> Result<f64> {
    if partition.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: partition.n() });
    }
    let k = partition.k();
    for i in 0..k {
        let gap = induced_gap(g, partition.block(i))?;
        if gap < a - BOUND_SLACK {
            return Err(Error::HypothesisViolation(format!("block {i} has gap {gap} below a = {a}")));
        }
    }
    for v in 0..g.n() {
        let d = g.deg_into(v, partition.block(partition.block_of(v)));
        if (d as f64) < b {
            return Err(Error::HypothesisViolation(format!("vertex {v} has {d} neighbours in its block, below b = {b}")));
        }
    }
    if k == 1 {
        return Ok(a);
    }
    if !h_graph(g, partition, c).is_connected() {
        return Err(Error::HypothesisViolation(format!("block graph at threshold c = {c} is disconnected")));
    }
    let n = g.n() as f64;
    Ok(a.min(a * b * c / (6.0 * k as f64 * n.powi(3))))
}

/// Gap, leading eigenvalues and the available lower bounds.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub schema: &'static str,
    pub n: usize,
    pub gap: f64,
    pub lambda2: Option<f64>,
    pub lambda_k_list: Vec<f64>,
    pub trace_p2: f64,
    pub bounds: ReportBounds,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportBounds {
    pub jsvt: Option<f64>,
    pub path_method: Option<f64>,
    pub decomposition: Option<f64>,
}

impl SpectralReport {
    /// Computes the spectrum of `g` and, when a partition is given, the
    /// block-based bounds. `decomposition` holds `(a, b, c)`; a failed
    /// hypothesis leaves that bound empty. `top` limits the eigenvalue list.
    pub fn build(g: &Graph, partition: Option<&Partition>, decomposition: Option<(f64, f64, f64)>, top: usize) -> Result<Self> {
        let net = Network::<f64>::from_graph(g);
        let s = spectrum(&net, ChainMode::Simple)?;
        let mut bounds = ReportBounds::default();
        if g.n() <= 256 {
            bounds.path_method = path_method_bound_bfs(&net).ok();
        }
        if let Some(p) = partition {
            bounds.jsvt = Some(jsvt_lower_bound(&net, p)?);
            if let Some((a, b, c)) = decomposition {
                bounds.decomposition = decomposition_gap_bound(g, p, a, b, c).ok();
            }
        }
        Ok(Self {
            schema: crate::SCHEMA,
            n: g.n(),
            gap: s.gap,
            lambda2: s.lambda2(),
            lambda_k_list: s.eigenvalues.iter().take(top).copied().collect(),
            trace_p2: s.trace_p2,
            bounds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Network {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Network::from_graph(&Graph::from_edges(n, &edges).unwrap())
    }

    #[test]
    fn complete_graph_spectrum() {
        for n in [4usize, 5, 6] {
            let s = spectrum(&complete(n), ChainMode::Simple).unwrap();
            let expected = n as f64 / (n as f64 - 1.0);
            assert!((s.gap - expected).abs() < 1e-10);
            assert!((s.eigenvalues[0] - 1.0).abs() < 1e-10);
            let lazy = spectrum(&complete(n), ChainMode::Lazy).unwrap();
            assert!((lazy.gap - expected / 2.0).abs() < 1e-10);
            let sum_sq: f64 = s.eigenvalues.iter().map(|x| x * x).sum();
            assert!((sum_sq - s.trace_p2).abs() < 1e-8);
        }
    }

    #[test]
    fn single_vertex_gap_is_one() {
        let net = Network::<f64>::from_weighted_edges(1, &[]).unwrap();
        assert_eq!(spectrum(&net, ChainMode::Simple).unwrap().gap, 1.0);
    }

    #[test]
    fn f32_spectrum_agrees() {
        let edges: Vec<_> = (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v))).collect();
        let g = Graph::from_edges(6, &edges).unwrap();
        let s = spectrum(&Network::<f32>::from_graph(&g), ChainMode::Simple).unwrap();
        assert!((s.gap - 1.2).abs() < 1e-4);
    }

    #[test]
    fn dirichlet_examples() {
        let k2 = complete(2);
        assert!((dirichlet_form(&k2, &[0.0, 1.0], ChainMode::Lazy).unwrap() - 0.25).abs() < 1e-15);
        assert!((dirichlet_form(&k2, &[0.0, 1.0], ChainMode::Simple).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(dirichlet_form(&complete(5), &[3.0; 5], ChainMode::Simple).unwrap(), 0.0);
    }

    #[test]
    fn projection_examples() {
        let k4 = complete(4);
        let trivial = projection_chain(&k4, &Partition::trivial(4)).unwrap();
        assert_eq!(trivial.p.as_slice(), &[1.0]);
        let split = Partition::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let proj = projection_chain(&k4, &split).unwrap();
        assert!((proj.p.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((proj.p.get(1, 0) - 2.0 / 3.0).abs() < 1e-15);
        let singles = projection_chain(&k4, &Partition::singletons(4)).unwrap();
        assert_eq!(singles.p, k4.transition_matrix(false));
    }

    #[test]
    fn restriction_rows_are_stochastic() {
        let k4 = complete(4);
        let split = Partition::from_blocks(4, &[vec![0, 1, 2], vec![3]]).unwrap();
        let r = restriction_chain(&k4, &split, 0).unwrap();
        for s in r.p.row_sums() {
            assert!((s - 1.0).abs() < 1e-15);
        }
        assert!((r.p.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn path_method_on_k2() {
        let k2 = complete(2);
        assert!((path_method_bound_bfs(&k2).unwrap() - 2.0).abs() < 1e-12);
        assert!((spectrum(&k2, ChainMode::Simple).unwrap().gap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn path_method_rejects_non_edges() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let net = Network::<f64>::from_graph(&g);
        let mut family = PathFamily::bfs(&net);
        family.insert(vec![0, 2]).unwrap();
        assert!(matches!(path_method_bound(&net, &family), Err(Error::InvalidPath(_))));
    }

    #[test]
    fn uniform_laziness_scales_gap() {
        let net = complete(5);
        let gap = spectrum(&net, ChainMode::Simple).unwrap().gap;
        let q = lazy_vector_chain_gap(&net, &[0.3; 5]).unwrap();
        assert!((q - 0.7 * gap).abs() < 1e-10);
        assert_eq!(lazy_vector_gap_bound(gap, 0.0).unwrap(), gap);
    }

    #[test]
    fn decomposition_bound_single_block() {
        let edges: Vec<_> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let g = Graph::from_edges(5, &edges).unwrap();
        assert_eq!(decomposition_gap_bound(&g, &Partition::trivial(5), 0.5, 4.0, 0.0).unwrap(), 0.5);
        assert!(matches!(
            decomposition_gap_bound(&g, &Partition::trivial(5), 2.0, 4.0, 0.0),
            Err(Error::HypothesisViolation(_))
        ));
    }
}
