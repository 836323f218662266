//! Cheeger constant: exact enumeration for small graphs and a spectral
//! sweep upper bound for larger ones.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::network::Network;
use crate::spectral::{eigenpairs, ChainMode};

/// Largest graph accepted by [`cheeger_exact`].
pub const EXACT_LIMIT: usize = 24;

/// `|∂S| / Vol(S)` as an exact fraction.
#[derive(Clone, Copy, Debug)]
struct Ratio {
    cut: u64,
    vol: u64,
}

impl Ratio {
    fn less_than(self, other: Ratio) -> bool {
        self.cut * other.vol < other.cut * self.vol
    }

    fn value(self) -> f64 {
        self.cut as f64 / self.vol as f64
    }
}

/// `Φ(G) = min |∂S|/Vol(S)` over nonempty `S` with `Vol(S) ≤ Vol(V)/2`,
/// together with a minimizing set.
pub fn cheeger_exact(g: &Graph) -> Result<(f64, VertexSet)> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(Error::SizeGuard { n, limit: EXACT_LIMIT, what: "exact Cheeger constant" });
    }
    if n < 2 || g.m() == 0 {
        return Err(Error::Parameter("the Cheeger constant needs at least one edge".into()));
    }
    let masks: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |acc, &u| acc | (1 << u))).collect();
    let degrees: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    let half = g.m() as u64;
    let total = 2 * half;
    // S ranges over subsets avoiding the last vertex; each is scored together with its complement
    let free = n - 1;
    let mut s: u32 = 0;
    let mut cut: i64 = 0;
    let mut vol: u64 = 0;
    let mut best: Option<(Ratio, u32)> = None;
    let consider = |r: Ratio, mask: u32, best: &mut Option<(Ratio, u32)>| {
        if r.vol > 0 && r.vol <= half && best.is_none_or(|(b, _)| r.less_than(b)) {
            *best = Some((r, mask));
        }
    };
    let full: u32 = (1u32 << n) - 1;
    for i in 1u64..(1u64 << free) {
        let bit = i.trailing_zeros() as usize;
        let inside = (masks[bit] & s).count_ones() as i64;
        let deg = degrees[bit] as i64;
        if s & (1 << bit) == 0 {
            s |= 1 << bit;
            vol += degrees[bit];
            cut += deg - 2 * inside;
        } else {
            s &= !(1 << bit);
            vol -= degrees[bit];
            cut -= deg - 2 * inside;
        }
        let c = cut as u64;
        consider(Ratio { cut: c, vol }, s, &mut best);
        consider(Ratio { cut: c, vol: total - vol }, full & !s, &mut best);
    }
    // the complement of the empty set: S = V is never admissible, but S = {last} may be
    consider(Ratio { cut: degrees[free], vol: degrees[free] }, 1 << free, &mut best);
    let (ratio, mask) = best.ok_or_else(|| Error::Parameter("no admissible set".into()))?;
    let set = VertexSet::from_vertices(n, (0..n).filter(|&v| mask & (1 << v) != 0))?;
    Ok((ratio.value(), set))
}

/// Best conductance among prefixes of the second eigenvector ordering.
/// Each prefix is scored on whichever side has the smaller volume, so the
/// result is an upper bound on `Φ(G)`.
pub fn cheeger_sweep(g: &Graph) -> Result<(f64, VertexSet)> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Parameter("the Cheeger constant needs at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let pairs = eigenpairs(&Network::<f64>::from_graph(g), ChainMode::Simple)?;
    let fiedler = &pairs[1].1;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));
    let total = 2 * g.m() as u64;
    let mut in_s = vec![false; n];
    let mut cut: i64 = 0;
    let mut vol: u64 = 0;
    let mut best: Option<(Ratio, usize, bool)> = None;
    for (j, &v) in order.iter().enumerate().take(n - 1) {
        let inside = g.neighbors(v).iter().filter(|&&u| in_s[u as usize]).count() as i64;
        cut += g.degree(v) as i64 - 2 * inside;
        vol += g.degree(v) as u64;
        in_s[v] = true;
        let prefix_small = 2 * vol <= total;
        let r = Ratio { cut: cut as u64, vol: if prefix_small { vol } else { total - vol } };
        if best.is_none_or(|(b, _, _)| r.less_than(b)) {
            best = Some((r, j + 1, prefix_small));
        }
    }
    let (ratio, len, prefix_small) = best.expect("n ≥ 2 gives at least one prefix");
    let members: Vec<usize> = if prefix_small { order[..len].to_vec() } else { order[len..].to_vec() };
    Ok((ratio.value(), VertexSet::from_vertices(n, members)?))
}

/// The comparison constant `c(δ) = δ¹⁹/2³⁴` in `γ ≥ c(δ)Φ`.
pub fn cheeger_comparison_constant(delta: f64) -> f64 {
    delta.powi(19) / 2f64.powi(34)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn small_examples() {
        let (phi, s) = cheeger_exact(&complete(4)).unwrap();
        assert!((phi - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.len(), 2);
        assert_eq!(cheeger_exact(&complete(2)).unwrap().0, 1.0);
        let (phi, s) = cheeger_exact(&two_triangles()).unwrap();
        assert!((phi - 1.0 / 7.0).abs() < 1e-15);
        assert!(s.to_vec() == vec![0, 1, 2] || s.to_vec() == vec![3, 4, 5]);
    }

    #[test]
    fn sweep_matches_closed_forms() {
        for n in [5, 8, 11] {
            let (phi, _) = cheeger_sweep(&complete(n)).unwrap();
            assert!((phi - n.div_ceil(2) as f64 / (n - 1) as f64).abs() < 1e-12, "n = {n}");
        }
        assert!((cheeger_sweep(&two_triangles()).unwrap().0 - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        assert!(matches!(cheeger_exact(&complete(25)), Err(Error::SizeGuard { .. })));
        assert!(cheeger_exact(&Graph::from_edges(1, &[]).unwrap()).is_err());
    }
}
