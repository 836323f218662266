//! Bubble sums of killed walks, the diameter-tail constant, and Monte Carlo
//! probes of walks hitting large sets and staying inside blocks.

use log::warn;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::GoodDecomposition;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::network::Network;
use crate::rng::{derive_seed, RngStream};
use crate::scalar::Scalar;
use crate::walk::DENSE_LIMIT;

/// Longest truncation [`bubble_sum_to_tolerance`] will pick.
pub const MAX_TRUNCATION: usize = 1_000_000;

/// `ℬ_W = Σ_{t≥0} (t+1) sup_v p^t_W(v,v)` certified to lie in
/// `[partial, partial + tail_bound]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BubbleSumResult {
    /// `Σ_{t=0}^{T} (t+1) sup_v p^t_W(v,v)`.
    pub partial: f64,
    pub tail_bound: f64,
    pub t_max: usize,
    /// Spectral radius of the killed operator.
    pub rho: f64,
    /// `sup_v p^t_W(v,v)` for `t = 0..=T`.
    pub series: Vec<f64>,
}

impl BubbleSumResult {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }

    /// The sum without its `t = 0` term, `Σ_{t≥1}`.
    pub fn from_t1(&self) -> (f64, f64) {
        let head = self.series.first().copied().unwrap_or(0.0);
        (self.partial - head, self.upper() - head)
    }
}

/// `Σ_{t>T} (t+1) ρ^t`.
pub fn geometric_tail(rho: f64, t_max: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let t = t_max as f64;
    let a = rho.powf(t + 1.0);
    ((t + 2.0) * a - (t + 1.0) * a * rho) / ((1.0 - rho) * (1.0 - rho))
}

/// Eigen-decomposition of the killed operator `D^{1/2} P_W D^{-1/2}` on `V∖W`:
/// eigenvalues and, per free vertex, the squared eigenvector weights.
struct KilledSpectrum {
    values: Vec<f64>,
    weights: Vec<Vec<f64>>,
    rho: f64,
}

fn killed_spectrum<S: Scalar>(net: &Network<S>, w: &VertexSet) -> Result<KilledSpectrum> {
    let n = net.n();
    if w.universe() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.universe() });
    }
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    if n > DENSE_LIMIT {
        return Err(Error::SizeGuard { n, limit: DENSE_LIMIT, what: "bubble sum" });
    }
    let free: Vec<usize> = (0..n).filter(|&v| !w.contains(v)).collect();
    let m = free.len();
    if m == 0 {
        return Ok(KilledSpectrum { values: Vec::new(), weights: Vec::new(), rho: 0.0 });
    }
    let mut local = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        local[v] = i;
    }
    let root: Vec<f64> = (0..n).map(|v| net.strength(v).as_f64().sqrt()).collect();
    let mut a = vec![0.0; m * m];
    for (i, &u) in free.iter().enumerate() {
        if root[u] == 0.0 {
            return Err(Error::Disconnected);
        }
        for (&v, &wt) in net.neighbors(u).iter().zip(net.neighbor_weights(u)) {
            let j = local[v as usize];
            if j != usize::MAX {
                a[i * m + j] = wt.as_f64() / (root[u] * root[v as usize]);
            }
        }
        a[i * m + i] = net.loop_weight(u).as_f64() / (root[u] * root[u]);
    }
    let eig = f64::symmetric_eigen(m, &a, true)?;
    let vectors = eig.vectors.expect("vectors were requested");
    let weights = (0..m).map(|i| (0..m).map(|j| vectors[i * m + j] * vectors[i * m + j]).collect()).collect();
    let rho = eig.values.iter().fold(0.0f64, |r, x| r.max(x.abs()));
    Ok(KilledSpectrum { values: eig.values, weights, rho })
}

fn accumulate(killed: &KilledSpectrum, t_max: usize) -> BubbleSumResult {
    if killed.values.is_empty() {
        return BubbleSumResult { partial: 0.0, tail_bound: 0.0, t_max, rho: 0.0, series: vec![0.0; t_max + 1] };
    }
    let rows: Vec<Vec<f64>> = killed
        .weights
        .par_iter()
        .map(|c| {
            let mut pw = vec![1.0; killed.values.len()];
            let mut row = Vec::with_capacity(t_max + 1);
            for _ in 0..=t_max {
                row.push(c.iter().zip(&pw).map(|(x, y)| x * y).sum::<f64>().max(0.0));
                for (p, mu) in pw.iter_mut().zip(&killed.values) {
                    *p *= mu;
                }
            }
            row
        })
        .collect();
    let series: Vec<f64> = (0..=t_max).map(|t| rows.iter().map(|r| r[t]).fold(0.0, f64::max)).collect();
    let partial = series.iter().enumerate().map(|(t, s)| (t + 1) as f64 * s).sum();
    BubbleSumResult { partial, tail_bound: geometric_tail(killed.rho, t_max), t_max, rho: killed.rho, series }
}

fn check_rho(rho: f64, rho_cap: f64) -> Result<()> {
    if rho >= rho_cap || rho >= 1.0 {
        return Err(Error::TailDivergence { rho, cap: rho_cap.min(1.0) });
    }
    Ok(())
}

/// Bubble sum truncated at `t_max` with a geometric tail bound from the
/// spectral radius `ρ` of the killed operator.
pub fn bubble_sum<S: Scalar>(net: &Network<S>, w: &VertexSet, t_max: usize, rho_cap: f64) -> Result<BubbleSumResult> {
    let killed = killed_spectrum(net, w)?;
    check_rho(killed.rho, rho_cap)?;
    Ok(accumulate(&killed, t_max))
}

/// Bubble sum with the shortest truncation whose tail bound is at most `tol`.
pub fn bubble_sum_to_tolerance<S: Scalar>(net: &Network<S>, w: &VertexSet, tol: f64, rho_cap: f64) -> Result<BubbleSumResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    let killed = killed_spectrum(net, w)?;
    check_rho(killed.rho, rho_cap)?;
    let mut t = 0;
    while geometric_tail(killed.rho, t) > tol {
        if t >= MAX_TRUNCATION {
            return Err(Error::Convergence { n: MAX_TRUNCATION });
        }
        t = (t * 2).clamp(1, MAX_TRUNCATION);
    }
    // shrink back to the first t within the last doubling that meets tol
    let (mut lo, mut hi) = (t / 2, t);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if geometric_tail(killed.rho, mid) <= tol {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(accumulate(&killed, hi))
}

/// `C₃ = 138420·D⁴ℬ³·ln(192Dℬ)`.
pub fn mns_c3(d_ratio: f64, bubble: f64) -> Result<f64> {
    if !(d_ratio >= 1.0 && bubble >= 1.0) {
        return Err(Error::Domain(format!("need D ≥ 1 and ℬ ≥ 1, got D = {d_ratio}, ℬ = {bubble}")));
    }
    let arg = 192.0 * d_ratio * bubble;
    if arg <= 1.0 {
        return Err(Error::Domain(format!("192·D·ℬ = {arg} must exceed 1")));
    }
    Ok(138420.0 * d_ratio.powi(4) * bubble.powi(3) * arg.ln())
}

/// `Pr(diam(UST(G/W)) ≥ ℓ) ≤ C₃|W|/ℓ`.
pub fn diameter_tail_bound(c3: f64, w_size: usize, ell: usize) -> Result<f64> {
    if ell == 0 {
        return Err(Error::Domain("ℓ must be at least 1".into()));
    }
    Ok(c3 * w_size as f64 / ell as f64)
}

/// `max deg / min deg`.
pub fn degree_ratio(g: &Graph) -> Result<f64> {
    if g.min_degree() == 0 {
        return Err(Error::Domain("a vertex has degree zero".into()));
    }
    Ok(g.max_degree() as f64 / g.min_degree() as f64)
}

/// A Bernoulli frequency with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

impl ProbeEstimate {
    fn from_count(hits: usize, trials: usize, seed: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let stderr = if trials == 0 { 0.0 } else { (p * (1.0 - p) / trials as f64).sqrt() };
        Self { estimate: p, stderr, trials, seed }
    }
}

#[inline]
fn simple_step<R: Rng + ?Sized>(g: &Graph, v: usize, rng: &mut R) -> usize {
    let nb = g.neighbors(v);
    nb[rng.random_range(0..nb.len())] as usize
}

/// The horizon `2(t_mix(ε/2) + ⌊√n⌋)` within which a walk should hit any
/// set of at least `ε√n` vertices.
pub fn hit_horizon(g: &Graph, eps: f64) -> Result<usize> {
    let tmix = crate::walk::mixing_time_exact(&Network::<f64>::from_graph(g), eps / 2.0)?;
    Ok(2 * (tmix + (g.n() as f64).sqrt().floor() as usize))
}

/// Frequency with which a simple walk from `v` enters `u` within `horizon` steps.
pub fn probe_hit_large_set(
    g: &Graph,
    u: &VertexSet,
    v: usize,
    horizon: usize,
    trials: usize,
    eps: f64,
    master_seed: u64,
) -> Result<ProbeEstimate> {
    let n = g.n();
    if v >= n {
        return Err(Error::VertexOutOfRange { v, n });
    }
    if u.universe() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.universe() });
    }
    let threshold = eps * (n as f64).sqrt();
    if (u.len() as f64) < threshold {
        warn!("target set has {} vertices, below ε√n = {threshold:.2}", u.len());
    }
    if !u.contains(v) && g.degree(v) == 0 {
        return Err(Error::Disconnected);
    }
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = RngStream::for_trial(master_seed, t as u64);
            let mut x = v;
            if u.contains(x) {
                return true;
            }
            for _ in 0..horizon {
                x = simple_step(g, x, &mut rng);
                if u.contains(x) {
                    return true;
                }
            }
            false
        })
        .count();
    Ok(ProbeEstimate::from_count(hits, trials, master_seed))
}

/// Per-vertex outcome of [`probe_stay_in_block`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartVertexProbe {
    pub vertex: usize,
    /// Frequency of `∃t ∈ [1, H]: X_t ∈ V_i, X_{t+1} ∉ V_i`.
    pub escape: f64,
    /// Frequency of `X[0, H] ⊆ V_i`.
    pub stay: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StayProbe {
    pub block: usize,
    pub c: f64,
    pub horizon: usize,
    pub trials_per_vertex: usize,
    pub seed: u64,
    pub per_vertex: Vec<StartVertexProbe>,
    /// Escape frequency pooled over all start vertices.
    pub escape: ProbeEstimate,
    /// `C√n·ε⁹θ²β/(δ²n²)`, which is `Cθ²ε⁹/δ²` at `β = n^{3/2}`.
    pub escape_bound: f64,
    /// Stay frequency required to enter `V_i′`: `1 − 80` times the escape
    /// bound over `δ⁴`.
    pub stay_threshold: f64,
    pub v_prime: Vec<usize>,
}

impl StayProbe {
    /// `(vertex, stay frequency)` for the vertices of `V_i′`.
    pub fn v_prime_scores(&self) -> Vec<(usize, f64)> {
        self.per_vertex.iter().filter(|p| p.stay >= self.stay_threshold).map(|p| (p.vertex, p.stay)).collect()
    }
}

/// Runs `trials` simple walks of `⌈C√n⌉ + 1` steps from every vertex of
/// block `i` and records how often they escape the block.
pub fn probe_stay_in_block(
    g: &Graph,
    gd: &GoodDecomposition,
    i: usize,
    c: f64,
    trials: usize,
    master_seed: u64,
) -> Result<StayProbe> {
    let p = &gd.partition;
    if p.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: p.n() });
    }
    if i >= p.k() {
        return Err(Error::Parameter(format!("block {i} does not exist (k = {})", p.k())));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("C = {c} must be positive")));
    }
    let n = g.n() as f64;
    let horizon = (c * n.sqrt()).ceil() as usize;
    let block = p.block(i);
    let starts = block.to_vec();
    let block_seed = derive_seed(master_seed, i as u64);
    let per_vertex: Vec<(StartVertexProbe, usize)> = starts
        .par_iter()
        .map(|&v| {
            let vertex_seed = derive_seed(block_seed, v as u64);
            let mut escapes = 0;
            let mut stays = 0;
            for t in 0..trials {
                let mut rng = RngStream::for_trial(vertex_seed, t as u64);
                let mut x = v;
                let mut escaped = false;
                let mut left = false;
                for step in 1..=horizon + 1 {
                    let prev = x;
                    x = simple_step(g, x, &mut rng);
                    let outside = !block.contains(x);
                    if outside && step <= horizon {
                        left = true;
                    }
                    // a move out of the block at time t ≥ 1
                    if step >= 2 && outside && block.contains(prev) {
                        escaped = true;
                    }
                    if escaped && left {
                        break;
                    }
                }
                escapes += usize::from(escaped);
                stays += usize::from(!left);
            }
            let tf = trials.max(1) as f64;
            (StartVertexProbe { vertex: v, escape: escapes as f64 / tf, stay: stays as f64 / tf }, escapes)
        })
        .collect();
    let total_escapes: usize = per_vertex.iter().map(|(_, e)| e).sum();
    let per_vertex: Vec<StartVertexProbe> = per_vertex.into_iter().map(|(p, _)| p).collect();
    let (eps, delta, theta, beta) = (gd.epsilon, gd.delta, gd.theta, gd.beta);
    let escape_bound = c * n.sqrt() * eps.powi(9) * theta * theta * beta / (delta * delta * n * n);
    let stay_threshold = 1.0 - 80.0 * escape_bound / delta.powi(4);
    let v_prime = per_vertex.iter().filter(|p| p.stay >= stay_threshold).map(|p| p.vertex).collect();
    Ok(StayProbe {
        block: i,
        c,
        horizon,
        trials_per_vertex: trials,
        seed: block_seed,
        escape: ProbeEstimate::from_count(total_escapes, trials * starts.len(), block_seed),
        per_vertex,
        escape_bound,
        stay_threshold,
        v_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::killed_return_prob;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn k3_terms_match_killed_returns() {
        let g = complete(3);
        let net = Network::<f64>::from_graph(&g);
        let w = VertexSet::from_vertices(3, [2]).unwrap();
        let b = bubble_sum(&net, &w, 12, 0.999).unwrap();
        for t in 0..=12 {
            let direct = (0..3).map(|v| killed_return_prob(&net, &w, v, t).unwrap()).fold(0.0, f64::max);
            assert!((b.series[t] - direct).abs() < 1e-12, "t = {t}");
        }
        assert!((b.series[2] - 0.25).abs() < 1e-12);
        assert!((b.rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_set_gives_zero() {
        let net = Network::<f64>::from_graph(&complete(5));
        let b = bubble_sum(&net, &VertexSet::full(5), 10, 0.99).unwrap();
        assert_eq!(b.upper(), 0.0);
    }

    #[test]
    fn tail_guard() {
        let net = Network::<f64>::from_graph(&complete(30));
        let w = VertexSet::from_vertices(30, [0]).unwrap();
        assert!(matches!(bubble_sum(&net, &w, 10, 0.5), Err(Error::TailDivergence { .. })));
        assert!(matches!(bubble_sum(&net, &VertexSet::empty(30), 10, 0.5), Err(Error::EmptySet)));
    }

    #[test]
    fn tolerance_picks_short_truncation() {
        let net = Network::<f64>::from_graph(&complete(20));
        let w = VertexSet::from_vertices(20, 0..5).unwrap();
        let b = bubble_sum_to_tolerance(&net, &w, 1e-9, 0.999).unwrap();
        assert!(b.tail_bound <= 1e-9);
        assert!(b.t_max == 0 || geometric_tail(b.rho, b.t_max - 1) > 1e-9);
    }

    #[test]
    fn c3_formula() {
        assert!((mns_c3(1.0, 1.0).unwrap() - 138420.0 * 192f64.ln()).abs() < 1e-6);
        assert!(mns_c3(0.5, 2.0).is_err());
        assert!(mns_c3(1.0, 0.9).is_err());
        assert!(diameter_tail_bound(1.0, 3, 0).is_err());
        assert!(diameter_tail_bound(10.0, 3, 1_000_000).unwrap() < 1e-4);
    }

    #[test]
    fn hitting_the_whole_graph_is_immediate() {
        let g = complete(10);
        let est = probe_hit_large_set(&g, &VertexSet::full(10), 3, 0, 50, 0.1, 7).unwrap();
        assert_eq!(est.estimate, 1.0);
    }
}
