//! Primary decompositions, good coarsenings and their audits.
//!
//! The refinement step needs a cut `W = W₁ ⊔ W₂` with
//! `|E(W₁,W₂)| ≤ (δ³/20)|W₁||W₂|`. Blocks of at most [`EXHAUSTIVE_LIMIT`]
//! vertices are searched exhaustively; larger ones try disconnected pieces,
//! single-vertex cuts and a Fiedler sweep polished by local moves. Whatever
//! the search finds, the result is certified by the audit.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde::ser::SerializeTuple;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::network::Network;
use crate::partition::{crossing_counts, h_graph, Partition};
use crate::spectral::{eigenpairs, induced_gap, ChainMode};

/// Largest block searched over all bipartitions.
pub const EXHAUSTIVE_LIMIT: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One audited condition: `value` compared against `threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl ConditionCheck {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, relation: Relation::AtMost, pass: value <= threshold }
    }

    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold, relation: Relation::AtLeast, pass: value >= threshold }
    }
}

impl Serialize for ConditionCheck {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.value)?;
        t.serialize_element(&self.threshold)?;
        t.serialize_element(&self.pass)?;
        t.end()
    }
}

fn checks_as_map<S: Serializer>(checks: &[ConditionCheck], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(checks.len()))?;
    for c in checks {
        m.serialize_entry(c.name, c)?;
    }
    m.end()
}

/// Audit of a δ-primary decomposition plus the bookkeeping of its construction.
#[derive(Clone, Debug, Serialize)]
pub struct PrimaryAudit {
    pub k: usize,
    #[serde(serialize_with = "checks_as_map")]
    pub conditions: Vec<ConditionCheck>,
    pub block_min_degree: Vec<usize>,
    pub block_gap: Vec<f64>,
    pub negligible_edges: usize,
    pub bad: Vec<usize>,
    pub evil: Vec<usize>,
    /// Evil vertices for which no block reached the `δ²n/3` neighbour
    /// count; these went to the block with the most neighbours.
    pub fallback_assignments: usize,
}

impl PrimaryAudit {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }
}

fn check_min_degree(g: &Graph, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("δ = {delta} must lie in (0, 1]")));
    }
    let required = delta * g.n() as f64;
    // allow δn to be hit from below by rounding, e.g. δ = (n−1)/n
    if (g.min_degree() as f64) < required - 1e-9 {
        return Err(Error::DegreePrecondition { min_degree: g.min_degree(), required });
    }
    Ok(())
}

/// Exact evaluation of the four primary conditions.
pub fn verify_primary(g: &Graph, partition: &Partition, delta: f64) -> Result<PrimaryAudit> {
    if partition.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: partition.n() });
    }
    let n = g.n() as f64;
    let k = partition.k();
    let block_min_degree: Vec<usize> = (0..k)
        .map(|i| {
            let block = partition.block(i);
            block.iter().map(|v| g.deg_into(v, block)).min().unwrap_or(0)
        })
        .collect();
    let block_gap = (0..k)
        .into_par_iter()
        .map(|i| induced_gap(g, partition.block(i)))
        .collect::<Result<Vec<f64>>>()?;
    let min_size = partition.sizes().into_iter().min().unwrap_or(0);
    let conditions = vec![
        ConditionCheck::at_most("block_count", k as f64, 2.0 / delta),
        ConditionCheck::at_least("block_size", min_size as f64, delta * n / 2.0),
        ConditionCheck::at_least("internal_degree", block_min_degree.iter().copied().min().unwrap_or(0) as f64, delta.powi(4) * n / 40.0),
        ConditionCheck::at_least("block_gap", block_gap.iter().copied().fold(f64::INFINITY, f64::min), delta.powi(10) / 2f64.powi(22)),
    ];
    Ok(PrimaryAudit {
        k,
        conditions,
        block_min_degree,
        block_gap,
        negligible_edges: 0,
        bad: Vec::new(),
        evil: Vec::new(),
        fallback_assignments: 0,
    })
}

/// A cut of a block into `side` and its complement.
struct Cut {
    side: Vec<usize>,
    ratio: f64,
}

/// Searches `block` for a cut with `|E(W₁,W₂)| ≤ limit·|W₁||W₂|`.
fn find_negligible_cut(g: &Graph, block: &VertexSet, limit: f64) -> Result<Option<Cut>> {
    let m = block.len();
    if m < 2 {
        return Ok(None);
    }
    let (sub, map) = g.induced_subgraph(block)?;
    // disconnected pieces are free to split off
    let comps = sub.components();
    if comps.len() > 1 {
        let side = comps[0].iter().map(|&v| map[v]).collect();
        return Ok(Some(Cut { side, ratio: 0.0 }));
    }
    let best = if m <= EXHAUSTIVE_LIMIT { exhaustive_cut(&sub) } else { heuristic_cut(&sub)? };
    Ok(best.filter(|c| c.ratio <= limit).map(|c| Cut { side: c.side.iter().map(|&v| map[v]).collect(), ratio: c.ratio }))
}

/// Minimum of `cut/(|S||W∖S|)` over all bipartitions by Gray-code enumeration.
fn exhaustive_cut(sub: &Graph) -> Option<Cut> {
    let m = sub.n();
    let masks: Vec<u32> = (0..m).map(|v| sub.neighbors(v).iter().fold(0u32, |acc, &u| acc | (1 << u))).collect();
    // vertex 0 stays on the complement side; S ranges over nonempty subsets of 1..m
    let mut s: u32 = 0;
    let mut cut: i64 = 0;
    let mut size: usize = 0;
    let mut best: Option<(f64, u32)> = None;
    for i in 1u64..(1u64 << (m - 1)) {
        let bit = i.trailing_zeros() as usize + 1;
        let inside = (masks[bit] & s).count_ones() as i64;
        let deg = masks[bit].count_ones() as i64;
        if s & (1 << bit) == 0 {
            s |= 1 << bit;
            size += 1;
            cut += deg - 2 * inside;
        } else {
            s &= !(1 << bit);
            size -= 1;
            cut -= deg - 2 * inside;
        }
        if size == 0 {
            continue;
        }
        let ratio = cut as f64 / (size * (m - size)) as f64;
        if best.is_none_or(|(r, _)| ratio < r) {
            best = Some((ratio, s));
        }
    }
    best.map(|(ratio, mask)| Cut { side: (0..m).filter(|&v| mask & (1 << v) != 0).collect(), ratio })
}

fn ratio_of(cut: i64, size: usize, m: usize) -> f64 {
    if size == 0 || size == m {
        f64::INFINITY
    } else {
        cut as f64 / (size * (m - size)) as f64
    }
}

/// Best of single-vertex cuts and a Fiedler sweep, improved by greedy moves.
fn heuristic_cut(sub: &Graph) -> Result<Option<Cut>> {
    let m = sub.n();
    let mut best: Option<(f64, Vec<bool>)> = None;
    for v in 0..m {
        let r = ratio_of(sub.degree(v) as i64, 1, m);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            let mut side = vec![false; m];
            side[v] = true;
            best = Some((r, side));
        }
    }
    let pairs = eigenpairs(&Network::<f64>::from_graph(sub), ChainMode::Simple)?;
    let fiedler = &pairs[1].1;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));
    let mut in_s = vec![false; m];
    let mut cut: i64 = 0;
    let mut sweep_best: Option<(f64, usize)> = None;
    for (j, &v) in order.iter().enumerate().take(m - 1) {
        let inside = sub.neighbors(v).iter().filter(|&&u| in_s[u as usize]).count() as i64;
        cut += sub.degree(v) as i64 - 2 * inside;
        in_s[v] = true;
        let r = ratio_of(cut, j + 1, m);
        if sweep_best.is_none_or(|(b, _)| r < b) {
            sweep_best = Some((r, j + 1));
        }
    }
    if let Some((r, len)) = sweep_best {
        let mut side = vec![false; m];
        for &v in &order[..len] {
            side[v] = true;
        }
        let (r, side) = local_moves(sub, side, r);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, side));
        }
    }
    Ok(best.map(|(ratio, side)| Cut { side: (0..m).filter(|&v| side[v]).collect(), ratio }))
}

/// Moves single vertices across the cut while the ratio strictly improves.
fn local_moves(sub: &Graph, mut side: Vec<bool>, mut ratio: f64) -> (f64, Vec<bool>) {
    let m = sub.n();
    let mut d_in: Vec<i64> = (0..m).map(|v| sub.neighbors(v).iter().filter(|&&u| side[u as usize]).count() as i64).collect();
    let mut size = side.iter().filter(|&&x| x).count();
    let mut cut: i64 = (0..m).filter(|&v| side[v]).map(|v| sub.degree(v) as i64 - d_in[v]).sum();
    for _ in 0..2 * m {
        let mut best: Option<(f64, usize, i64)> = None;
        for v in 0..m {
            let deg = sub.degree(v) as i64;
            let (new_cut, new_size) = if side[v] {
                (cut - (deg - d_in[v]) + d_in[v], size - 1)
            } else {
                (cut - d_in[v] + (deg - d_in[v]), size + 1)
            };
            let r = ratio_of(new_cut, new_size, m);
            if best.is_none_or(|(b, _, _)| r < b) {
                best = Some((r, v, new_cut));
            }
        }
        match best {
            Some((r, v, new_cut)) if r < ratio * (1.0 - 1e-12) => {
                let delta = if side[v] { -1 } else { 1 };
                side[v] = !side[v];
                size = (size as i64 + delta) as usize;
                cut = new_cut;
                ratio = r;
                for &u in sub.neighbors(v) {
                    d_in[u as usize] += delta;
                }
            }
            _ => break,
        }
    }
    (ratio, side)
}

/// Builds a δ-primary decomposition: refine along negligible cuts, drop
/// bad sets, and redistribute their (evil) vertices to the good sets.
pub fn primary_decomposition(g: &Graph, delta: f64) -> Result<(Partition, PrimaryAudit)> {
    check_min_degree(g, delta)?;
    let n = g.n();
    let nf = n as f64;
    let limit = delta.powi(3) / 20.0;
    let mut pending = vec![VertexSet::full(n)];
    let mut finished = Vec::new();
    let mut negligible_at = vec![0usize; n];
    let mut negligible_edges = 0usize;
    while let Some(block) = pending.pop() {
        match find_negligible_cut(g, &block, limit)? {
            Some(cut) => {
                let w1 = VertexSet::from_vertices(n, cut.side)?;
                let mut w2 = block.clone();
                for v in w1.iter() {
                    w2.remove(v);
                }
                for v in w1.iter() {
                    for &u in g.neighbors(v) {
                        if w2.contains(u as usize) {
                            negligible_at[v] += 1;
                            negligible_at[u as usize] += 1;
                            negligible_edges += 1;
                        }
                    }
                }
                debug!("split a block of {} into {} + {} (ratio {:.3e})", block.len(), w1.len(), w2.len(), cut.ratio);
                pending.push(w2);
                pending.push(w1);
            }
            None => finished.push(block),
        }
    }
    finished.sort_by_key(|b| b.iter().next());
    let bad_threshold = delta * nf / 2.0;
    let is_bad: Vec<bool> = negligible_at.iter().map(|&c| c as f64 > bad_threshold).collect();
    let bad: Vec<usize> = (0..n).filter(|&v| is_bad[v]).collect();
    let (good_sets, bad_sets): (Vec<VertexSet>, Vec<VertexSet>) =
        finished.into_iter().partition(|b| b.iter().any(|v| !is_bad[v]));
    if good_sets.is_empty() {
        return Err(Error::Unsatisfiable("refinement left no good sets".into()));
    }
    let mut evil: Vec<usize> = bad_sets.iter().flat_map(|b| b.iter()).collect();
    evil.sort_unstable();
    let mut blocks = good_sets.clone();
    let mut fallback_assignments = 0;
    let target = delta * delta * nf / 3.0;
    for &v in &evil {
        let counts: Vec<usize> = good_sets.iter().map(|u| g.deg_into(v, u)).collect();
        let choice = match counts.iter().position(|&c| c as f64 >= target) {
            Some(i) => i,
            None => {
                fallback_assignments += 1;
                let max = *counts.iter().max().expect("at least one good set");
                counts.iter().position(|&c| c == max).expect("max is attained")
            }
        };
        blocks[choice].insert(v);
    }
    let partition = Partition::from_sets(n, &blocks)?;
    let mut audit = verify_primary(g, &partition, delta)?;
    audit.negligible_edges = negligible_edges;
    audit.bad = bad;
    audit.evil = evil;
    audit.fallback_assignments = fallback_assignments;
    if !audit.passed() {
        return Err(Error::RefinementStall(Box::new(audit)));
    }
    Ok((partition, audit))
}

/// Outcome of coarsening a partition.
#[derive(Clone, Debug, Serialize)]
pub struct Coarsening {
    pub partition: Partition,
    pub theta: f64,
    pub merges: usize,
    /// `θ₁ = ε, θ₂, …` in the order they were in force.
    pub theta_history: Vec<f64>,
    /// `ln(ε (εα/ℓ²)^{2^ℓ})`, the guaranteed lower bound on `ln θ`.
    pub ln_theta_floor: f64,
    /// Every merged block's pieces are joined in the block graph at threshold `θβ`.
    pub pieces_connected: bool,
    /// Every block has boundary at most `θ²αβ`.
    pub boundary_ok: bool,
}

/// Merges blocks of `fine` until every block has boundary at most `θ²αβ`,
/// updating `θ ↦ (α/ℓ²)θ²` at each merge.
pub fn coarsen(g: &Graph, fine: &Partition, eps: f64, alpha: f64, beta: f64) -> Result<Coarsening> {
    if !(eps > 0.0 && eps < 1.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("ε = {eps} and α = {alpha} must lie in (0, 1)")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!("β = {beta} must be positive")));
    }
    if fine.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: fine.n() });
    }
    let ell = fine.k();
    let lf = ell as f64;
    let counts = crossing_counts(g, fine);
    let mut group_of: Vec<usize> = (0..ell).collect();
    let mut groups: Vec<Vec<usize>> = (0..ell).map(|a| vec![a]).collect();
    let mut theta = eps;
    let mut history = vec![theta];
    let mut merges = 0;
    let boundary = |group: &[usize], group_of: &[usize], id: usize| -> usize {
        group.iter().map(|&a| (0..ell).filter(|&b| group_of[b] != id).map(|b| counts[a][b]).sum::<usize>()).sum()
    };
    loop {
        let threshold = theta * theta * alpha * beta;
        let violator = (0..groups.len()).find(|&i| !groups[i].is_empty() && boundary(&groups[i], &group_of, i) as f64 > threshold);
        let Some(u) = violator else { break };
        let mut pick: Option<(usize, usize, usize)> = None;
        for &a in &groups[u] {
            for b in 0..ell {
                if group_of[b] != u && pick.is_none_or(|(c, _, _)| counts[a][b] > c) {
                    pick = Some((counts[a][b], a, b));
                }
            }
        }
        let (_, _, b) = pick.expect("a block with positive boundary has an outside neighbour");
        let other = group_of[b];
        let (keep, gone) = (u.min(other), u.max(other));
        let moved = std::mem::take(&mut groups[gone]);
        for &a in &moved {
            group_of[a] = keep;
        }
        groups[keep].extend(moved);
        groups[keep].sort_unstable();
        theta = alpha / (lf * lf) * theta * theta;
        history.push(theta);
        merges += 1;
    }
    let groups: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    let partition = fine.merge(&groups)?;
    let c = theta * beta;
    let pieces_connected = groups.iter().all(|group| {
        if group.len() == 1 {
            return true;
        }
        let labels: Vec<usize> = (0..group.len()).collect();
        let sub_adj: Vec<Vec<u32>> = labels
            .iter()
            .map(|&i| labels.iter().filter(|&&j| j != i && counts[group[i]][group[j]] as f64 > c).map(|&j| j as u32).collect())
            .collect();
        Graph::from_sorted_adjacency(sub_adj).is_connected()
    });
    let threshold = theta * theta * alpha * beta;
    let boundary_ok = (0..partition.k()).all(|i| g.edge_boundary(partition.block(i)) as f64 <= threshold);
    let ln_theta_floor = eps.ln() + 2f64.powf(lf) * (eps * alpha / (lf * lf)).ln();
    Ok(Coarsening { partition, theta, merges, theta_history: history, ln_theta_floor, pieces_connected, boundary_ok })
}

/// A partition with its parameter `θ` and the audit of the five
/// good-decomposition conditions plus the range of `θ`.
#[derive(Clone, Debug, Serialize)]
pub struct GoodDecomposition {
    pub partition: Partition,
    pub theta: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    #[serde(serialize_with = "checks_as_map")]
    pub audit: Vec<ConditionCheck>,
    pub negligible_edges: usize,
    pub evil_count: usize,
    pub merges: usize,
}

impl GoodDecomposition {
    pub fn passed(&self) -> bool {
        self.audit.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.audit.iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }

    /// The `decompose` report document.
    pub fn report(&self) -> serde_json::Value {
        let audit: serde_json::Map<String, serde_json::Value> = self
            .audit
            .iter()
            .map(|c| (c.name.to_string(), serde_json::json!([c.value, c.threshold, c.pass])))
            .collect();
        serde_json::json!({
            "schema": crate::SCHEMA,
            "k": self.partition.k(),
            "theta": self.theta,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "beta": self.beta,
            "blocks": self.partition.sizes(),
            "audit": audit,
            "negligible_edges": self.negligible_edges,
            "evil_count": self.evil_count,
            "merges": self.merges,
            "pass": self.passed(),
        })
    }
}

/// Default `β = n^{3/2}`.
pub fn default_beta(n: usize) -> f64 {
    (n as f64).powf(1.5)
}

/// Largest admissible `β`, `240 n² / (ε δ⁴)`.
pub fn max_beta(n: usize, eps: f64, delta: f64) -> f64 {
    240.0 * (n as f64).powi(2) / (eps * delta.powi(4))
}

/// A primary decomposition coarsened with `α = ε⁹`, then audited.
pub fn good_decomposition(g: &Graph, eps: f64, delta: f64, beta: Option<f64>) -> Result<GoodDecomposition> {
    check_min_degree(g, delta)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("ε = {eps} must lie in (0, 1)")));
    }
    let n = g.n();
    let beta = beta.unwrap_or_else(|| default_beta(n));
    let cap = max_beta(n, eps, delta);
    if !(beta > 0.0 && beta <= cap) {
        return Err(Error::Parameter(format!("β = {beta} must lie in (0, {cap}]")));
    }
    if eps > 0.3 {
        warn!("ε = {eps} exceeds 0.3; the audit decides whether the decomposition is good");
    }
    let (primary, primary_audit) = primary_decomposition(g, delta)?;
    let coarse = coarsen(g, &primary, eps, eps.powi(9), beta)?;
    let mut gd = GoodDecomposition {
        partition: coarse.partition,
        theta: coarse.theta,
        epsilon: eps,
        delta,
        beta,
        audit: Vec::new(),
        negligible_edges: primary_audit.negligible_edges,
        evil_count: primary_audit.evil.len(),
        merges: coarse.merges,
    };
    gd.audit = verify_good(g, &gd)?;
    if !gd.passed() {
        return Err(Error::AuditFailed(Box::new(gd)));
    }
    Ok(gd)
}

/// Exact evaluation of the good-decomposition conditions for the partition
/// and parameters stored in `gd`.
pub fn verify_good(g: &Graph, gd: &GoodDecomposition) -> Result<Vec<ConditionCheck>> {
    let p = &gd.partition;
    if p.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: p.n() });
    }
    let n = g.n() as f64;
    let (eps, delta, theta, beta) = (gd.epsilon, gd.delta, gd.theta, gd.beta);
    let k = p.k();
    let gaps = (0..k).into_par_iter().map(|i| induced_gap(g, p.block(i))).collect::<Result<Vec<f64>>>()?;
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let min_size = p.sizes().into_iter().min().unwrap_or(0);
    let min_internal = (0..k)
        .flat_map(|i| {
            let block = p.block(i);
            block.iter().map(move |v| g.deg_into(v, block))
        })
        .min()
        .unwrap_or(0);
    let max_boundary = (0..k).map(|i| g.edge_boundary(p.block(i))).max().unwrap_or(0);
    let ln_floor = 11.0 * 2f64.powf(2.0 / delta) * eps.ln();
    Ok(vec![
        ConditionCheck::at_most("block_count", k as f64, 2.0 / delta),
        ConditionCheck::at_least("block_size", min_size as f64, delta * n / 2.0),
        ConditionCheck::at_least("block_gap", min_gap, delta.powi(15) * theta * beta / (2f64.powi(31) * n * n)),
        ConditionCheck::at_least("internal_degree", min_internal as f64, delta.powi(4) * n / 40.0),
        ConditionCheck::at_most("boundary", max_boundary as f64, eps.powi(9) * theta * theta * beta),
        ConditionCheck::at_least("theta_floor_ln", theta.ln(), ln_floor),
        ConditionCheck::at_most("theta_ceiling", theta, eps),
    ])
}

/// The block graph of `partition` at threshold `c` restricted to its blocks
/// is connected; convenience wrapper used by reports.
pub fn block_graph_connected(g: &Graph, partition: &Partition, c: f64) -> bool {
    h_graph(g, partition, c).is_connected()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

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
    fn complete_graph_is_one_block() {
        let g = complete(30);
        let (p, audit) = primary_decomposition(&g, 29.0 / 30.0).unwrap();
        assert_eq!(p.k(), 1);
        assert!(audit.passed());
        assert_eq!(audit.negligible_edges, 0);
        let (p, _) = primary_decomposition(&complete(12), 11.0 / 12.0).unwrap();
        assert_eq!(p.k(), 1);
    }

    #[test]
    fn two_cliques_split() {
        let g = two_cliques_bridge(100);
        let (p, audit) = primary_decomposition(&g, 0.4).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.canonical().labels(), &[vec![0; 100], vec![1; 100]].concat()[..]);
        assert_eq!(audit.negligible_edges, 1);
        assert!(audit.passed());
    }

    #[test]
    fn small_two_cliques_stay_whole() {
        // the bridge ratio 1/100 exceeds δ³/20, so the cut is not negligible
        let g = two_cliques_bridge(10);
        let (p, _) = primary_decomposition(&g, 0.45).unwrap();
        assert_eq!(p.k(), 1);
        let best = exhaustive_cut(&g).unwrap();
        assert!((best.ratio - 0.01).abs() < 1e-15);
        let mut side = best.side.clone();
        side.sort_unstable();
        assert!(side == (0..10).collect::<Vec<_>>() || side == (10..20).collect::<Vec<_>>());
    }

    #[test]
    fn degree_precondition() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(matches!(primary_decomposition(&g, 0.5), Err(Error::DegreePrecondition { .. })));
    }

    #[test]
    fn verify_flags_small_blocks() {
        let g = complete(40);
        let uneven = Partition::from_blocks(40, &[(0..2).collect(), (2..40).collect()]).unwrap();
        let audit = verify_primary(&g, &uneven, 0.5).unwrap();
        assert!(audit.failed().contains(&"block_size"));
        let single = Partition::from_blocks(40, &[vec![0], (1..40).collect()]).unwrap();
        assert!(verify_primary(&g, &single, 0.5).unwrap().failed().contains(&"internal_degree"));
    }

    #[test]
    fn coarsen_keeps_good_partition() {
        let g = two_cliques_bridge(200);
        let p = Partition::from_blocks(400, &[(0..200).collect(), (200..400).collect()]).unwrap();
        let c = coarsen(&g, &p, 0.5, 0.5, default_beta(400)).unwrap();
        assert_eq!(c.partition.k(), 2);
        assert_eq!(c.theta, 0.5);
        assert_eq!(c.merges, 0);
        let single = coarsen(&g, &Partition::trivial(400), 0.1, 0.1, 1.0).unwrap();
        assert_eq!(single.partition.k(), 1);
        assert_eq!(single.theta, 0.1);
    }

    #[test]
    fn coarsen_merges_when_boundary_is_heavy() {
        let g = two_cliques_bridge(200);
        let p = Partition::from_blocks(400, &[(0..200).collect(), (200..400).collect()]).unwrap();
        let eps = 0.3f64;
        let alpha = eps.powi(9);
        let c = coarsen(&g, &p, eps, alpha, default_beta(400)).unwrap();
        assert_eq!(c.partition.k(), 1);
        assert_eq!(c.merges, 1);
        assert!((c.theta - alpha / 4.0 * eps * eps).abs() < 1e-20);
        assert!(c.theta.ln() >= c.ln_theta_floor);
        assert!(c.pieces_connected && c.boundary_ok);
    }

    #[test]
    fn good_decomposition_of_complete_graph() {
        let g = complete(60);
        let gd = good_decomposition(&g, 0.3, 0.45, None).unwrap();
        assert_eq!(gd.partition.k(), 1);
        assert_eq!(gd.theta, 0.3);
        assert!(gd.passed());
        assert!(matches!(good_decomposition(&g, 0.3, 0.45, Some(1e12)), Err(Error::Parameter(_))));
    }

    #[test]
    fn theta_above_eps_fails_range() {
        let g = complete(60);
        let mut gd = good_decomposition(&g, 0.3, 0.45, None).unwrap();
        gd.theta = 0.31;
        assert!(verify_good(&g, &gd).unwrap().iter().any(|c| c.name == "theta_ceiling" && !c.pass));
    }
}
