//! Graph families used by experiments and tests.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Attempts before a random family gives up on its constraints.
pub const RETRY_BUDGET: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Complete,
    /// Two cliques on `⌊n/2⌋` and `⌈n/2⌉` vertices joined by one edge.
    TwoCliquesBridge,
    /// `G(n, p)`, resampled until connected and meeting the degree constraint.
    DenseGnp { p: f64 },
    CompleteBipartite { a: usize, b: usize },
    Star,
    File { path: PathBuf },
}

impl Family {
    /// Whether two draws with different seeds can differ.
    pub fn is_random(&self) -> bool {
        matches!(self, Family::DenseGnp { .. })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Complete => write!(f, "complete"),
            Family::TwoCliquesBridge => write!(f, "two-cliques-bridge"),
            Family::DenseGnp { p } => write!(f, "dense-gnp:{p}"),
            Family::CompleteBipartite { a, b } => write!(f, "complete-bipartite:{a},{b}"),
            Family::Star => write!(f, "star"),
            Family::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `complete`, `two-cliques-bridge`, `dense-gnp:P`, `complete-bipartite:A,B`,
    /// `star` or `file:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let bad = |what: &str| Error::Parameter(format!("bad family `{s}`: {what}"));
        match (name, arg) {
            ("complete", None) => Ok(Family::Complete),
            ("two-cliques-bridge", None) => Ok(Family::TwoCliquesBridge),
            ("star", None) => Ok(Family::Star),
            ("dense-gnp", Some(p)) => Ok(Family::DenseGnp { p: p.parse().map_err(|_| bad("p is not a number"))? }),
            ("complete-bipartite", Some(ab)) => {
                let (a, b) = ab.split_once(',').ok_or_else(|| bad("expected A,B"))?;
                Ok(Family::CompleteBipartite {
                    a: a.trim().parse().map_err(|_| bad("A is not an integer"))?,
                    b: b.trim().parse().map_err(|_| bad("B is not an integer"))?,
                })
            }
            ("file", Some(path)) => Ok(Family::File { path: PathBuf::from(path) }),
            _ => Err(bad("unknown family")),
        }
    }
}

pub fn complete(n: usize) -> Graph {
    let adj = (0..n).map(|v| (0..n as u32).filter(|&u| u as usize != v).collect()).collect();
    Graph::from_sorted_adjacency(adj)
}

pub fn two_cliques_bridge(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::Parameter(format!("two cliques need n ≥ 4, got {n}")));
    }
    let h = n / 2;
    let mut adj: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let range = if v < h { 0..h } else { h..n };
            range.filter(|&u| u != v).map(|u| u as u32).collect()
        })
        .collect();
    adj[h - 1].push(h as u32);
    adj[h].insert(0, (h - 1) as u32);
    Ok(Graph::from_sorted_adjacency(adj))
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let n = a + b;
    let adj = (0..n)
        .map(|v| if v < a { (a as u32..n as u32).collect() } else { (0..a as u32).collect() })
        .collect();
    Graph::from_sorted_adjacency(adj)
}

pub fn star(n: usize) -> Graph {
    let adj = (0..n).map(|v| if v == 0 { (1..n as u32).collect() } else { vec![0] }).collect();
    Graph::from_sorted_adjacency(adj)
}

/// One `G(n, p)` draw.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
    }
    Graph::from_sorted_adjacency(adj)
}

/// A `G(n, p)` draw that is connected with minimum degree at least `δn`.
pub fn constrained_gnp<R: Rng + ?Sized>(n: usize, p: f64, delta: Option<f64>, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} must lie in [0, 1]")));
    }
    for _ in 0..RETRY_BUDGET {
        let g = gnp(n, p, rng);
        if g.is_connected() && meets_degree(&g, delta) {
            return Ok(g);
        }
    }
    Err(Error::Unsatisfiable(format!("no connected G({n}, {p}) with the degree constraint in {RETRY_BUDGET} draws")))
}

/// Uniform random labelled tree on `n` vertices from a Prüfer sequence.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Graph {
    if n < 2 {
        return Graph::from_sorted_adjacency(vec![Vec::new(); n]);
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = leaves.pop_first().expect("a Prüfer step always has a leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let a = leaves.pop_first().expect("two leaves remain");
    let b = leaves.pop_first().expect("two leaves remain");
    edges.push((a, b));
    Graph::from_edges(n, &edges).expect("Prüfer decoding yields a simple tree")
}

fn meets_degree(g: &Graph, delta: Option<f64>) -> bool {
    delta.is_none_or(|d| g.min_degree() as f64 >= d * g.n() as f64 - 1e-9)
}

/// A connected member of `family` on `n` vertices with minimum degree at
/// least `δn` when `delta` is given.
pub fn generate<R: Rng + ?Sized>(family: &Family, n: usize, delta: Option<f64>, rng: &mut R) -> Result<Graph> {
    let g = match family {
        Family::Complete => complete(n),
        Family::TwoCliquesBridge => two_cliques_bridge(n)?,
        Family::DenseGnp { p } => return constrained_gnp(n, *p, delta, rng),
        Family::CompleteBipartite { a, b } => {
            if a + b != n {
                return Err(Error::Parameter(format!("complete-bipartite:{a},{b} has {} vertices, not {n}", a + b)));
            }
            complete_bipartite(*a, *b)
        }
        Family::Star => star(n),
        Family::File { path } => {
            let text = std::fs::read_to_string(path)?;
            let is_json = path.extension().is_some_and(|e| e == "json");
            let g = if is_json { Graph::from_json(&text)? } else { Graph::from_edge_list(&text)? };
            if g.n() != n && n != 0 {
                return Err(Error::Parameter(format!("{} has {} vertices, not {n}", path.display(), g.n())));
            }
            g
        }
    };
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if !meets_degree(&g, delta) {
        return Err(Error::Unsatisfiable(format!(
            "{family} on {} vertices has minimum degree {}, below δn = {}",
            g.n(),
            g.min_degree(),
            delta.unwrap_or(0.0) * g.n() as f64
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn deterministic_families() {
        let mut rng = RngStream::new(1);
        assert_eq!(generate(&Family::Complete, 5, None, &mut rng).unwrap().m(), 10);
        let g = generate(&Family::TwoCliquesBridge, 10, None, &mut rng).unwrap();
        assert_eq!(g.m(), 21);
        assert!(g.has_edge(4, 5));
        assert_eq!(complete_bipartite(2, 3).m(), 6);
        assert_eq!(star(6).max_degree(), 5);
    }

    #[test]
    fn dense_gnp_meets_degree() {
        let mut rng = RngStream::new(9);
        let g = generate(&Family::DenseGnp { p: 0.9 }, 100, Some(0.7), &mut rng).unwrap();
        assert!(g.min_degree() >= 70);
        assert!(matches!(generate(&Family::DenseGnp { p: 0.1 }, 50, Some(0.9), &mut rng), Err(Error::Unsatisfiable(_))));
    }

    #[test]
    fn parse_family() {
        for s in ["complete", "two-cliques-bridge", "dense-gnp:0.5", "complete-bipartite:3,4", "star", "file:g.txt"] {
            assert_eq!(s.parse::<Family>().unwrap().to_string(), s);
        }
        assert!("gnp".parse::<Family>().is_err());
    }

    #[test]
    fn prufer_trees() {
        let mut rng = RngStream::new(3);
        for n in [2, 3, 10, 50] {
            let t = random_tree(n, &mut rng);
            assert_eq!(t.m(), n - 1);
            assert!(t.is_connected());
        }
    }
}
