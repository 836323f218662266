//! Seeded experiment drivers producing tables for CSV or JSON output.
//!
//! Every random quantity is drawn from a stream derived from the master
//! seed, the experiment, the family, `n` and the trial index, so results
//! do not depend on thread count or scheduling.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cheeger::{cheeger_comparison_constant, cheeger_exact, cheeger_sweep, EXACT_LIMIT};
use crate::decomposition::{good_decomposition, GoodDecomposition};
use crate::error::{Error, Result};
use crate::estimators::{bubble_sum_to_tolerance, degree_ratio, diameter_tail_bound, mns_c3, probe_stay_in_block};
use crate::generators::{generate, Family};
use crate::graph::{Graph, VertexSet};
use crate::network::Network;
use crate::rng::{derive_seed, derive_tagged, RngStream};
use crate::spectral::{spectrum, ChainMode};
use crate::ust::{select_endpoints, wilson, SpanningTree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Parameters shared by all experiments; each reads the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n: Vec<usize>,
    pub delta: f64,
    pub eps: f64,
    /// Defaults to `n^{3/2}` per instance.
    pub beta: Option<f64>,
    pub trials: usize,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// `C` in the stay-in-block horizon `C√n` used to pick path endpoints.
    pub stay_c: f64,
    /// Walks per start vertex in the stay-in-block probe.
    pub stay_trials: usize,
    /// Diameter thresholds `ℓ` for the tail table; empty means `1..=max`.
    pub ells: Vec<usize>,
    /// Cap on the killed operator's spectral radius in bubble sums.
    pub rho_cap: f64,
    /// Width of the certified bubble-sum interval.
    pub bubble_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Complete,
            n: vec![64],
            delta: 0.5,
            eps: 0.3,
            beta: None,
            trials: 100,
            seed: None,
            threads: None,
            out: None,
            format: Format::Csv,
            stay_c: 1.0,
            stay_trials: 50,
            ells: Vec::new(),
            rho_cap: 1.0 - 1e-9,
            bubble_tol: 1e-9,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn master_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Parameter("a master seed is required for randomized runs".into()))
    }

    fn instance_seed(&self, experiment: &str, n: usize) -> Result<u64> {
        Ok(derive_tagged(self.master_seed()?, &format!("{experiment}/{}/{n}", self.family)))
    }

    fn graph(&self, n: usize, instance_seed: u64) -> Result<Graph> {
        let mut rng = RngStream::new(derive_tagged(instance_seed, "graph"));
        generate(&self.family, n, None, &mut rng)
    }

    fn params_json(&self) -> String {
        json!({ "delta": self.delta, "eps": self.eps, "beta": self.beta }).to_string()
    }
}

/// A named table of JSON-valued cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Header and data rows; no comment lines.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("cells are UTF-8")
    }

    fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().cloned()).collect()))
                .collect(),
        )
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Output of one experiment: its tables, the first being the primary one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// All tables as CSV, each introduced by `# table NAME`, after a
    /// `# ustlab/1 …` header line carrying the timestamp.
    pub fn to_csv(&self, timestamp: u64) -> String {
        let mut s = format!("# {} experiment={} generated={timestamp}\n", crate::SCHEMA, self.experiment);
        for t in &self.tables {
            s.push_str(&format!("# table {}\n", t.name));
            s.push_str(&t.to_csv());
        }
        s
    }

    pub fn to_json(&self, timestamp: u64) -> Value {
        let tables: serde_json::Map<String, Value> = self.tables.iter().map(|t| (t.name.clone(), t.to_json_rows())).collect();
        json!({ "schema": crate::SCHEMA, "experiment": self.experiment, "generated": timestamp, "tables": tables })
    }
}

/// Drops comment lines so two runs can be compared byte for byte.
pub fn strip_comments(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn ust_trials(net: &Network<f64>, trials: usize, instance_seed: u64) -> Result<Vec<(u64, SpanningTree)>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::for_trial(instance_seed, t as u64);
            let seed = rng.seed();
            Ok((seed, wilson(net, &mut rng)?))
        })
        .collect()
}

/// UST diameters over `trials` samples per `n`; tables `trials` and
/// `summary` (median and quantiles, plus the fitted log-log slope).
pub fn run_diameter_scaling(cfg: &ExperimentConfig) -> Result<Report> {
    let family = cfg.family.to_string();
    let mut rows = Table::new("trials", &["family", "n", "trial", "seed", "diameter"]);
    let mut summary = Table::new("summary", &["family", "n", "trials", "seed", "median", "q10", "q25", "q75", "q90", "mean", "slope"]);
    let mut medians = Vec::new();
    let mut pending = Vec::new();
    for &n in &cfg.n {
        let seed = cfg.instance_seed("scaling", n)?;
        let g = cfg.graph(n, seed)?;
        let net = Network::<f64>::from_graph(&g);
        let diam: Vec<(u64, usize)> = ust_trials(&net, cfg.trials, seed)?.into_iter().map(|(s, t)| (s, t.diameter())).collect();
        for (t, (s, d)) in diam.iter().enumerate() {
            rows.push(vec![json!(family), json!(n), json!(t), json!(s), json!(d)]);
        }
        let mut sorted: Vec<f64> = diam.iter().map(|&(_, d)| d as f64).collect();
        sorted.sort_by(f64::total_cmp);
        let median = quantile(&sorted, 0.5);
        let mean = sorted.iter().sum::<f64>() / sorted.len().max(1) as f64;
        medians.push((n as f64, median));
        pending.push(vec![
            json!(family),
            json!(n),
            json!(cfg.trials),
            json!(seed),
            json!(median),
            json!(quantile(&sorted, 0.1)),
            json!(quantile(&sorted, 0.25)),
            json!(quantile(&sorted, 0.75)),
            json!(quantile(&sorted, 0.9)),
            json!(mean),
        ]);
    }
    let slope = if medians.len() >= 2 && medians.iter().all(|m| m.1 > 0.0) { json!(log_log_slope(&medians)) } else { Value::Null };
    for mut row in pending {
        row.push(slope.clone());
        summary.push(row);
    }
    Ok(Report { experiment: "scaling".into(), tables: vec![rows, summary] })
}

/// Φ (exact up to 24 vertices, else the sweep upper bound) against the
/// simple-walk gap γ, with the Cheeger inequality and `γ ≥ c(δ)Φ` flags.
pub fn run_cheeger_vs_gap(cfg: &ExperimentConfig) -> Result<Report> {
    let family = cfg.family.to_string();
    let instances = if cfg.family.is_random() { cfg.trials } else { 1 };
    let c_delta = cheeger_comparison_constant(cfg.delta);
    let mut table = Table::new(
        "instances",
        &[
            "family", "n", "instance", "seed", "m", "min_degree", "phi", "phi_exact", "gamma", "ratio", "cheeger_lower", "cheeger_upper",
            "degree_ok", "c_delta", "comparison",
        ],
    );
    for &n in &cfg.n {
        let base = cfg.instance_seed("cheeger", n)?;
        let rows: Vec<Vec<Value>> = (0..instances)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(base, i as u64);
                let mut rng = RngStream::new(seed);
                let g = generate(&cfg.family, n, None, &mut rng)?;
                let exact = n <= EXACT_LIMIT;
                let phi = if exact { cheeger_exact(&g)?.0 } else { cheeger_sweep(&g)?.0 };
                let gamma = spectrum(&Network::<f64>::from_graph(&g), ChainMode::Simple)?.gap;
                // with the sweep value Φ̂ ≥ Φ, γ ≤ 2Φ̂ and γ ≥ cΦ̂ remain sufficient checks, Φ²/2 ≤ γ is not
                let lower = if exact { json!(phi * phi / 2.0 - 1e-9 <= gamma) } else { Value::Null };
                let degree_ok = g.min_degree() as f64 >= cfg.delta * n as f64 - 1e-9;
                Ok(vec![
                    json!(family),
                    json!(n),
                    json!(i),
                    json!(seed),
                    json!(g.m()),
                    json!(g.min_degree()),
                    json!(phi),
                    json!(exact),
                    json!(gamma),
                    json!(gamma / phi),
                    lower,
                    json!(gamma <= 2.0 * phi + 1e-9),
                    json!(degree_ok),
                    json!(c_delta),
                    json!(gamma >= c_delta * phi),
                ])
            })
            .collect::<Result<_>>()?;
        for row in rows {
            table.push(row);
        }
    }
    Ok(Report { experiment: "cheeger".into(), tables: vec![table] })
}

/// A good decomposition with the chosen endpoints `(v₁ⁱ, v₂ⁱ)` of every block.
#[derive(Clone, Debug)]
pub struct PathSetup {
    pub graph: Graph,
    pub decomposition: GoodDecomposition,
    pub endpoints: Vec<(usize, usize)>,
    /// `|V_i′|` per block.
    pub v_prime_sizes: Vec<usize>,
    pub seed: u64,
}

/// Decomposes the instance and picks, in every block, the two vertices of
/// `V_i′` with the highest stay frequency (all of `V_i` if `|V_i′| < 2`).
pub fn path_setup(cfg: &ExperimentConfig, experiment: &str, n: usize) -> Result<PathSetup> {
    let seed = cfg.instance_seed(experiment, n)?;
    let g = cfg.graph(n, seed)?;
    let gd = good_decomposition(&g, cfg.eps, cfg.delta, cfg.beta)?;
    let mut endpoints = Vec::new();
    let mut v_prime_sizes = Vec::new();
    for i in 0..gd.partition.k() {
        let probe = probe_stay_in_block(&g, &gd, i, cfg.stay_c, cfg.stay_trials, derive_tagged(seed, "stay"))?;
        let mut scores = probe.v_prime_scores();
        v_prime_sizes.push(scores.len());
        if scores.len() < 2 {
            scores = probe.per_vertex.iter().map(|p| (p.vertex, p.stay)).collect();
        }
        let pair = select_endpoints(&scores).ok_or_else(|| Error::Parameter(format!("block {i} has fewer than two vertices")))?;
        endpoints.push(pair);
    }
    Ok(PathSetup { graph: g, decomposition: gd, endpoints, v_prime_sizes, seed })
}

/// Per trial and block, the UST path between the block's endpoints and
/// whether `ε⁸θ√n ≤ |φ| ≤ √n/(θε⁸)` and `φ ⊆ V_i` hold.
pub fn run_path_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let family = cfg.family.to_string();
    let params = cfg.params_json();
    let mut trials = Table::new(
        "trials",
        &["family", "n", "block", "trial", "seed", "v1", "v2", "path_len", "lower", "upper", "in_window", "contained", "event"],
    );
    let mut summary = Table::new("summary", &["instance", "n", "param_json", "estimate", "stderr", "trials", "seed", "bound", "pass"]);
    for &n in &cfg.n {
        let setup = path_setup(cfg, "paths", n)?;
        let gd = &setup.decomposition;
        let root = (n as f64).sqrt();
        let scale = cfg.eps.powi(8) * gd.theta;
        let (lower, upper) = (scale * root, root / scale);
        let net = Network::<f64>::from_graph(&setup.graph);
        let samples = ust_trials(&net, cfg.trials, derive_tagged(setup.seed, "ust"))?;
        let mut hits = vec![0usize; gd.partition.k()];
        for (t, (seed, tree)) in samples.iter().enumerate() {
            for (i, &(v1, v2)) in setup.endpoints.iter().enumerate() {
                let path = tree.path(v1, v2);
                let len = path.vertices.len() - 1;
                let in_window = lower <= len as f64 && len as f64 <= upper;
                let block = gd.partition.block(i);
                let contained = path.vertices.iter().all(|&v| block.contains(v));
                let event = in_window && contained;
                hits[i] += usize::from(event);
                trials.push(vec![
                    json!(family),
                    json!(n),
                    json!(i),
                    json!(t),
                    json!(seed),
                    json!(v1),
                    json!(v2),
                    json!(len),
                    json!(lower),
                    json!(upper),
                    json!(in_window),
                    json!(contained),
                    json!(event),
                ]);
            }
        }
        for (i, &h) in hits.iter().enumerate() {
            let p = h as f64 / cfg.trials.max(1) as f64;
            let stderr = (p * (1.0 - p) / cfg.trials.max(1) as f64).sqrt();
            summary.push(vec![
                json!(format!("{family}/block{i}")),
                json!(n),
                json!(params),
                json!(p),
                json!(stderr),
                json!(cfg.trials),
                json!(setup.seed),
                json!(0.9),
                json!(p >= 0.9),
            ]);
        }
    }
    Ok(Report { experiment: "paths".into(), tables: vec![trials, summary] })
}

/// `W` as the union of the endpoint paths of one UST sample.
pub fn sample_w(setup: &PathSetup) -> Result<VertexSet> {
    let net = Network::<f64>::from_graph(&setup.graph);
    let mut rng = RngStream::new(derive_tagged(setup.seed, "w"));
    let tree = wilson(&net, &mut rng)?;
    let mut w = VertexSet::empty(setup.graph.n());
    for &(v1, v2) in &setup.endpoints {
        for v in tree.path(v1, v2).vertices {
            w.insert(v);
        }
    }
    Ok(w)
}

/// Builds `W` from UST paths per block, certifies `ℬ_W`, evaluates `C₃`
/// and compares the empirical diameter tail of `UST(G/W)` with `C₃|W|/ℓ`.
pub fn run_bubble_and_tail(cfg: &ExperimentConfig) -> Result<Report> {
    let family = cfg.family.to_string();
    let params = cfg.params_json();
    let mut instances = Table::new(
        "instances",
        &[
            "family", "n", "seed", "k", "theta", "w_size", "w_per_block_min", "w_required", "hypothesis", "bubble_lower", "bubble_upper",
            "rho", "t_max", "d_ratio", "c3",
        ],
    );
    let mut diam_rows = Table::new("trials", &["family", "n", "trial", "seed", "diameter"]);
    let mut tail = Table::new("tail", &["instance", "n", "param_json", "estimate", "stderr", "trials", "seed", "bound", "pass"]);
    for &n in &cfg.n {
        let setup = path_setup(cfg, "bubble", n)?;
        let gd = &setup.decomposition;
        let w = sample_w(&setup)?;
        let net = Network::<f64>::from_graph(&setup.graph);
        let per_block: Vec<usize> = (0..gd.partition.k()).map(|i| gd.partition.block(i).iter().filter(|&v| w.contains(v)).count()).collect();
        let required = cfg.eps.powi(8) * gd.theta * (n as f64).sqrt();
        let min_per_block = per_block.iter().copied().min().unwrap_or(0);
        let bubble = bubble_sum_to_tolerance(&net, &w, cfg.bubble_tol, cfg.rho_cap)?;
        let d_ratio = degree_ratio(&setup.graph)?;
        let c3 = if w.len() == n { None } else { Some(mns_c3(d_ratio, bubble.upper())?) };
        instances.push(vec![
            json!(family),
            json!(n),
            json!(setup.seed),
            json!(gd.partition.k()),
            json!(gd.theta),
            json!(w.len()),
            json!(min_per_block),
            json!(required),
            json!(min_per_block as f64 >= required),
            json!(bubble.partial),
            json!(bubble.upper()),
            json!(bubble.rho),
            json!(bubble.t_max),
            json!(d_ratio),
            json!(c3),
        ]);
        let contracted = net.contract(std::slice::from_ref(&w))?;
        let quotient = contracted.contracted();
        let samples = ust_trials(quotient, cfg.trials, derive_tagged(setup.seed, "quotient"))?;
        let diameters: Vec<usize> = samples.iter().map(|(_, t)| t.diameter()).collect();
        for (t, ((seed, _), d)) in samples.iter().zip(&diameters).enumerate() {
            diam_rows.push(vec![json!(family), json!(n), json!(t), json!(seed), json!(d)]);
        }
        let ells: Vec<usize> = if cfg.ells.is_empty() {
            (1..=diameters.iter().copied().max().unwrap_or(0).max(1)).collect()
        } else {
            cfg.ells.clone()
        };
        let total = cfg.trials.max(1) as f64;
        for ell in ells {
            let count = diameters.iter().filter(|&&d| d >= ell).count();
            let p = count as f64 / total;
            let stderr = (p * (1.0 - p) / total).sqrt();
            let bound = match c3 {
                Some(c3) => diameter_tail_bound(c3, w.len(), ell)?,
                None => 0.0,
            };
            tail.push(vec![
                json!(format!("{family}/ell{ell}")),
                json!(n),
                json!(params),
                json!(p),
                json!(stderr),
                json!(cfg.trials),
                json!(setup.seed),
                json!(bound),
                json!(p <= bound),
            ]);
        }
    }
    Ok(Report { experiment: "bubble".into(), tables: vec![instances, tail, diam_rows] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: Family, n: Vec<usize>, trials: usize) -> ExperimentConfig {
        ExperimentConfig { family, n, trials, seed: Some(11), ..Default::default() }
    }

    #[test]
    fn star_diameter_is_two() {
        let r = run_diameter_scaling(&cfg(Family::Star, vec![10, 20], 5)).unwrap();
        let t = r.table("trials").unwrap();
        let d = t.column("diameter").unwrap();
        assert!(t.rows.iter().all(|row| row[d] == json!(2)));
    }

    #[test]
    fn scaling_is_reproducible() {
        let c = cfg(Family::Complete, vec![16, 32], 8);
        let a = run_diameter_scaling(&c).unwrap();
        let b = run_diameter_scaling(&c).unwrap();
        assert_eq!(strip_comments(&a.to_csv(1)), strip_comments(&b.to_csv(2)));
    }

    #[test]
    fn seed_is_required() {
        let c = ExperimentConfig { seed: None, ..Default::default() };
        assert!(run_diameter_scaling(&c).is_err());
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        assert_eq!(csv_cell(&json!("{\"a\":1,\"b\":2}")), "\"{\"\"a\"\":1,\"\"b\"\":2}\"");
        assert_eq!(csv_cell(&json!(0.5)), "0.5");
    }

    #[test]
    fn slope_of_square_root() {
        let pts: Vec<(f64, f64)> = [4.0f64, 16.0, 64.0].iter().map(|&x| (x, x.sqrt())).collect();
        assert!((log_log_slope(&pts) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn config_round_trip() {
        let c = cfg(Family::DenseGnp { p: 0.8 }, vec![30], 3);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert!(ExperimentConfig::from_json("{\"bogus\": 1}").is_err());
    }
}
