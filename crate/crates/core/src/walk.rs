//! Random walks on networks: trajectories, exact distributions, total
//! variation, mixing times and killed return probabilities.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::network::Network;
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Dense operators (exact distributions, mixing times) are limited to this size.
pub const DENSE_LIMIT: usize = 4096;

/// Hard cap on the number of steps used by exact mixing-time iteration.
const MIXING_STEP_CAP: usize = 10_000_000;

/// A probability vector over the vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S = f64> {
    probs: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.iter().any(|p| !(p.is_finite() && *p >= S::zero())) {
            return Err(Error::Parameter("probabilities must be finite and nonnegative".into()));
        }
        let total: S = probs.iter().copied().sum();
        if (total.as_f64() - 1.0).abs() > S::STOCHASTIC_TOL * (probs.len().max(1) as f64) {
            return Err(Error::Parameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn point_mass(n: usize, v: usize) -> Self {
        let mut probs = vec![S::zero(); n];
        probs[v] = S::one();
        Self { probs }
    }

    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![S::one() / S::of(n as f64); n] }
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<S> {
        self.probs
    }
}

/// How the walker moves at each step.
#[derive(Clone, Debug, PartialEq)]
pub enum WalkMode<S = f64> {
    Simple,
    /// Stay put with probability 1/2.
    Lazy,
    /// Stay put at `v` with probability `p[v]`; each entry in `[0, 1)`.
    LazyVector(Vec<S>),
}

impl<S: Scalar> WalkMode<S> {
    pub fn lazy_vector(p: Vec<S>) -> Result<Self> {
        if let Some(x) = p.iter().find(|x| !(**x >= S::zero() && **x < S::one())) {
            return Err(Error::Parameter(format!("lazy-vector entry {x} is outside [0, 1)")));
        }
        Ok(Self::LazyVector(p))
    }

    fn hold_probability(&self, v: usize) -> f64 {
        match self {
            WalkMode::Simple => 0.0,
            WalkMode::Lazy => 0.5,
            WalkMode::LazyVector(p) => p[v].as_f64(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum StopRule {
    /// Run exactly this many steps.
    Budget(usize),
    /// Stop on first entry into `set`, or after `budget` steps.
    Target { set: VertexSet, budget: usize },
    /// Stop on first visit to the augmented vertex `rho`, or after `budget` steps.
    Rho { rho: usize, budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    StepBudget,
    HitTargetSet,
    HitRho,
}

/// The visited vertices of one walk and why it stopped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkTrace {
    pub vertices: Vec<usize>,
    pub stopped_by: StopReason,
    pub seed: u64,
}

impl WalkTrace {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialises")
    }
}

/// One step of the walk from `v` under `mode`.
#[inline]
pub(crate) fn step<S: Scalar, R: Rng + ?Sized>(net: &Network<S>, v: usize, mode: &WalkMode<S>, rng: &mut R) -> usize {
    let hold = mode.hold_probability(v);
    if hold > 0.0 && rng.random::<f64>() < hold {
        return v;
    }
    let lp = net.loop_weight(v);
    if lp > S::zero() && S::of(rng.random::<f64>()) * net.strength(v) < lp {
        return v;
    }
    net.sample_neighbor(v, rng)
}

/// Runs a walk from `start` until the stop rule fires.
pub fn walk<S: Scalar>(
    net: &Network<S>,
    start: usize,
    mode: &WalkMode<S>,
    stop: &StopRule,
    rng: &mut RngStream,
) -> Result<WalkTrace> {
    let n = net.n();
    if start >= n {
        return Err(Error::VertexOutOfRange { v: start, n });
    }
    if let WalkMode::LazyVector(p) = mode {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
    }
    let seed = rng.seed();
    let (budget, hit): (usize, Box<dyn Fn(usize) -> bool + '_>) = match stop {
        StopRule::Budget(t) => (*t, Box::new(|_| false)),
        StopRule::Target { set, budget } => (*budget, Box::new(move |v| set.contains(v))),
        StopRule::Rho { rho, budget } => {
            let rho = *rho;
            (*budget, Box::new(move |v| v == rho))
        }
    };
    let reason_on_hit = match stop {
        StopRule::Rho { .. } => StopReason::HitRho,
        _ => StopReason::HitTargetSet,
    };
    let mut vertices = vec![start];
    if hit(start) {
        return Ok(WalkTrace { vertices, stopped_by: reason_on_hit, seed });
    }
    if net.strength(start) == S::zero() && budget > 0 {
        return Err(Error::Disconnected);
    }
    let mut v = start;
    for _ in 0..budget {
        v = step(net, v, mode, rng);
        vertices.push(v);
        if hit(v) {
            return Ok(WalkTrace { vertices, stopped_by: reason_on_hit, seed });
        }
    }
    Ok(WalkTrace { vertices, stopped_by: StopReason::StepBudget, seed })
}

/// `π(v) = strength(v) / Σ strength`.
pub fn stationary<S: Scalar>(net: &Network<S>) -> Result<Distribution<S>> {
    if !net.is_connected() {
        return Err(Error::Disconnected);
    }
    let total = net.total_strength();
    if total == S::zero() {
        // a single isolated vertex
        return Ok(Distribution::point_mass(net.n(), 0));
    }
    Ok(Distribution { probs: (0..net.n()).map(|v| net.strength(v) / total).collect() })
}

/// Half the ℓ¹ distance.
pub fn tv_distance<S: Scalar>(a: &Distribution<S>, b: &Distribution<S>) -> Result<S> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let sum: S = a.probs.iter().zip(&b.probs).map(|(&x, &y)| (x - y).abs()).sum();
    Ok(sum * S::of(0.5))
}

/// One application of the transition operator: `d ↦ d P`.
pub fn step_distribution<S: Scalar>(net: &Network<S>, d: &Distribution<S>, mode: &WalkMode<S>) -> Result<Distribution<S>> {
    let n = net.n();
    if d.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: d.len() });
    }
    if let WalkMode::LazyVector(p) = mode {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
    }
    let mut out = vec![S::zero(); n];
    for v in 0..n {
        let mass = d.probs[v];
        if mass == S::zero() {
            continue;
        }
        let hold = match mode {
            WalkMode::Simple => S::zero(),
            WalkMode::Lazy => S::of(0.5),
            WalkMode::LazyVector(p) => p[v],
        };
        out[v] = out[v] + hold * mass;
        let moving = (S::one() - hold) * mass;
        let s = net.strength(v);
        if s == S::zero() {
            out[v] = out[v] + moving;
            continue;
        }
        let scale = moving / s;
        for (&u, &w) in net.neighbors(v).iter().zip(net.neighbor_weights(v)) {
            out[u as usize] = out[u as usize] + scale * w;
        }
        out[v] = out[v] + scale * net.loop_weight(v);
    }
    Ok(Distribution { probs: out })
}

/// Least `t` with `max_v d_TV(p^t(v,·), π) < ε` for the lazy walk.
pub fn mixing_time_exact<S: Scalar>(net: &Network<S>, eps: f64) -> Result<usize> {
    let n = net.n();
    if n > DENSE_LIMIT {
        return Err(Error::SizeGuard { n, limit: DENSE_LIMIT, what: "exact mixing time" });
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!("ε = {eps} must lie in (0, 1/2)")));
    }
    let pi = stationary(net)?;
    let per_start: Vec<Result<usize>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut d = Distribution::point_mass(n, v);
            for t in 0..=MIXING_STEP_CAP {
                if tv_distance(&d, &pi)?.as_f64() < eps {
                    return Ok(t);
                }
                d = step_distribution(net, &d, &WalkMode::Lazy)?;
            }
            Err(Error::BudgetExceeded { cap: MIXING_STEP_CAP as u64 })
        })
        .collect();
    per_start.into_iter().try_fold(0, |acc, r| r.map(|t| acc.max(t)))
}

/// `⌈log₂ n⌉ + ⌈ln(√2/(εδ)) / γ⌉` where `γ` is the lazy-walk spectral gap
/// and every degree is at least `δn`.
pub fn mixing_time_upper_bound(gamma: f64, n: usize, eps: f64, delta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Parameter(format!("γ = {gamma} must lie in (0, 1]")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("δ = {delta} must lie in (0, 1]")));
    }
    if !(eps > 0.0 && eps < 1.0) || n == 0 {
        return Err(Error::Parameter(format!("ε = {eps} must lie in (0, 1) and n > 0")));
    }
    let head = (n as f64).log2().ceil();
    let tail = ((2f64.sqrt() / (eps * delta)).ln() / gamma).ceil();
    Ok(head + tail.max(0.0))
}

/// Exact lazy mixing time next to its spectral upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixingBoundCheck {
    pub exact: usize,
    pub bound: f64,
    pub holds: bool,
}

pub fn check_mixing_bound(net: &Network<f64>, eps: f64, delta: f64) -> Result<MixingBoundCheck> {
    let exact = mixing_time_exact(net, eps)?;
    let gap = crate::spectral::spectrum(net, crate::spectral::ChainMode::Lazy)?.gap;
    let bound = mixing_time_upper_bound(gap, net.n(), eps, delta)?;
    Ok(MixingBoundCheck { exact, bound, holds: exact as f64 <= bound })
}

/// `p^t_W(v,v) = P_v(X_t = v, τ_W > t)` for the simple walk, by powering
/// the transition operator with the rows and columns of `W` removed.
pub fn killed_return_prob<S: Scalar>(net: &Network<S>, w: &VertexSet, v: usize, t: usize) -> Result<S> {
    Ok(*killed_return_series(net, w, v, t)?.last().expect("series has t + 1 entries"))
}

/// `[p^0_W(v,v), …, p^t_max_W(v,v)]`.
pub fn killed_return_series<S: Scalar>(net: &Network<S>, w: &VertexSet, v: usize, t_max: usize) -> Result<Vec<S>> {
    let n = net.n();
    if v >= n {
        return Err(Error::VertexOutOfRange { v, n });
    }
    if w.universe() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.universe() });
    }
    let mut out = Vec::with_capacity(t_max + 1);
    if w.contains(v) {
        out.resize(t_max + 1, S::zero());
        return Ok(out);
    }
    let mut x = vec![S::zero(); n];
    x[v] = S::one();
    out.push(S::one());
    for _ in 0..t_max {
        let mut next = vec![S::zero(); n];
        for u in 0..n {
            let mass = x[u];
            if mass == S::zero() {
                continue;
            }
            let scale = mass / net.strength(u);
            for (&y, &wt) in net.neighbors(u).iter().zip(net.neighbor_weights(u)) {
                let y = y as usize;
                if !w.contains(y) {
                    next[y] = next[y] + scale * wt;
                }
            }
            next[u] = next[u] + scale * net.loop_weight(u);
        }
        x = next;
        out.push(x[v]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn complete(n: usize) -> Network {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Network::from_graph(&Graph::from_edges(n, &edges).unwrap())
    }

    fn star(leaves: usize) -> Network {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Network::from_graph(&Graph::from_edges(leaves + 1, &edges).unwrap())
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary(&complete(5)).unwrap();
        assert!(pi.probs().iter().all(|p| (p - 0.2).abs() < 1e-15));
        let pi = stationary(&star(3)).unwrap();
        assert!((pi.probs()[0] - 0.5).abs() < 1e-15);
        assert!(pi.probs()[1..].iter().all(|p| (p - 1.0 / 6.0).abs() < 1e-15));
        let disconnected = Network::<f64>::from_weighted_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(stationary(&disconnected), Err(Error::Disconnected)));
    }

    #[test]
    fn k2_simple_walk_alternates() {
        let net = complete(2);
        let mut rng = RngStream::new(1);
        let tr = walk(&net, 0, &WalkMode::Simple, &StopRule::Budget(3), &mut rng).unwrap();
        assert_eq!(tr.vertices, vec![0, 1, 0, 1]);
        assert_eq!(tr.stopped_by, StopReason::StepBudget);
        assert_eq!(tr.seed, 1);
    }

    #[test]
    fn target_containing_start_stops_immediately() {
        let net = complete(4);
        let mut rng = RngStream::new(1);
        let set = VertexSet::from_vertices(4, [2]).unwrap();
        let tr = walk(&net, 2, &WalkMode::Simple, &StopRule::Target { set, budget: 100 }, &mut rng).unwrap();
        assert_eq!(tr.vertices, vec![2]);
        assert_eq!(tr.stopped_by, StopReason::HitTargetSet);
    }

    #[test]
    fn target_walk_stops_at_first_hit() {
        let net = complete(6);
        let set = VertexSet::from_vertices(6, [4, 5]).unwrap();
        for seed in 0..50 {
            let mut rng = RngStream::new(seed);
            let tr = walk(&net, 0, &WalkMode::Lazy, &StopRule::Target { set: set.clone(), budget: 10_000 }, &mut rng).unwrap();
            let last = *tr.vertices.last().unwrap();
            assert!(set.contains(last));
            assert!(tr.vertices[..tr.vertices.len() - 1].iter().all(|&v| !set.contains(v)));
            for w in tr.vertices.windows(2) {
                assert!(w[0] == w[1] || net.weight(w[0], w[1]) > 0.0);
            }
        }
    }

    #[test]
    fn lazy_vector_rejects_one() {
        assert!(WalkMode::<f64>::lazy_vector(vec![0.0, 0.99]).is_ok());
        assert!(WalkMode::<f64>::lazy_vector(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn tv_examples() {
        let a = Distribution::<f64>::point_mass(3, 0);
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(tv_distance(&a, &Distribution::point_mass(3, 2)).unwrap(), 1.0);
        let half = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(tv_distance(&Distribution::point_mass(2, 0), &half).unwrap(), 0.5);
        assert!(matches!(tv_distance(&a, &half), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn step_distribution_examples() {
        let k3 = complete(3);
        let d = step_distribution(&k3, &Distribution::point_mass(3, 0), &WalkMode::Simple).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.5, 0.5]);
        let k2 = complete(2);
        let d = step_distribution(&k2, &Distribution::point_mass(2, 0), &WalkMode::Lazy).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);
        let s = star(4);
        let pi = stationary(&s).unwrap();
        let next = step_distribution(&s, &pi, &WalkMode::Simple).unwrap();
        assert!(tv_distance(&pi, &next).unwrap() < 1e-12);
    }

    #[test]
    fn lazy_k2_mixes_in_one_step() {
        for eps in [0.01, 0.1, 0.25, 0.49] {
            assert_eq!(mixing_time_exact(&complete(2), eps).unwrap(), 1);
        }
        assert!(mixing_time_exact(&complete(2), 0.5).is_err());
    }

    #[test]
    fn mixing_time_is_monotone_in_eps() {
        let net = star(6);
        let times: Vec<usize> = [0.01, 0.05, 0.1, 0.25, 0.4].iter().map(|&e| mixing_time_exact(&net, e).unwrap()).collect();
        assert!(times.windows(2).all(|w| w[0] >= w[1]), "{times:?}");
    }

    #[test]
    fn upper_bound_shape() {
        let b1 = mixing_time_upper_bound(0.1, 16, 0.1, 0.5).unwrap();
        let b2 = mixing_time_upper_bound(0.2, 16, 0.1, 0.5).unwrap();
        assert!(b2 <= b1);
        let small = mixing_time_upper_bound(0.1, 16, 1e-2, 0.5).unwrap();
        let tiny = mixing_time_upper_bound(0.1, 16, 1e-4, 0.5).unwrap();
        // grows by ln(100)/γ ≈ 46 when ε shrinks a hundredfold
        assert!((tiny - small - (100f64.ln() / 0.1)).abs() <= 1.0);
        assert!(mixing_time_upper_bound(0.0, 16, 0.1, 0.5).is_err());
    }

    #[test]
    fn killed_return_examples() {
        let k3 = complete(3);
        let w = VertexSet::from_vertices(3, [2]).unwrap();
        assert_eq!(killed_return_prob(&k3, &w, 0, 0).unwrap(), 1.0);
        assert_eq!(killed_return_prob(&k3, &w, 0, 1).unwrap(), 0.0);
        assert!((killed_return_prob(&k3, &w, 0, 2).unwrap() - 0.25).abs() < 1e-15);
        let all = VertexSet::full(3);
        for t in 0..5 {
            assert_eq!(killed_return_prob(&k3, &all, 1, t).unwrap(), 0.0);
        }
    }
}
