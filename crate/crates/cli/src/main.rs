//! `ustlab` command-line harness.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use ustlab::experiments::{self, ExperimentConfig, Format, Report, Table};
use ustlab::generators::generate;
use ustlab::rng::derive_tagged;
use ustlab::spectral::SpectralReport;
use ustlab::{good_decomposition, wilson, Error, Family, Graph, GoodDecomposition, Network64, RngStream};

const GEN_HELP: &str = "\
CSV tables:
  graphs: family,n,seed,m,min_degree,max_degree,delta,degree_ok
  edges:  n,u,v";

const SAMPLE_HELP: &str = "\
CSV tables:
  trees: family,n,trial,seed,diameter,root,parents
    parents is space separated, with '-' at the root";

const SPECTRAL_HELP: &str = "\
CSV tables:
  spectra: family,n,seed,gap,lambda2,trace_p2,path_method,eigenvalues
    eigenvalues lists the --top largest, space separated";

const CHEEGER_HELP: &str = "\
CSV tables:
  instances: family,n,instance,seed,m,min_degree,phi,phi_exact,gamma,ratio,
             cheeger_lower,cheeger_upper,degree_ok,c_delta,comparison
    phi is exact up to 24 vertices, otherwise a sweep-cut upper bound;
    cheeger_lower is empty when phi is not exact";

const DECOMPOSE_HELP: &str = "\
CSV tables:
  decompositions: family,n,seed,k,theta,epsilon,delta,beta,negligible_edges,
                  evil_count,merges,pass
  audit:          n,condition,value,threshold,relation,pass
  labels:         n,vertex,block
Exits with status 2 when any audit condition fails.";

const BUBBLE_HELP: &str = "\
CSV tables:
  instances: family,n,seed,k,theta,w_size,w_per_block_min,w_required,hypothesis,
             bubble_lower,bubble_upper,rho,t_max,d_ratio,c3
  tail:      instance,n,param_json,estimate,stderr,trials,seed,bound,pass
  trials:    family,n,trial,seed,diameter";

const SCALING_HELP: &str = "\
CSV tables:
  trials:  family,n,trial,seed,diameter
  summary: family,n,trials,seed,median,q10,q25,q75,q90,mean,slope
    slope is the least-squares fit of ln median against ln n";

const PATHS_HELP: &str = "\
CSV tables:
  trials:  family,n,block,trial,seed,v1,v2,path_len,lower,upper,in_window,
           contained,event
  summary: instance,n,param_json,estimate,stderr,trials,seed,bound,pass";

#[derive(Parser)]
#[command(name = "ustlab", version, about = "Uniform spanning tree experiments on dense graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs and write their edge lists.
    #[command(after_help = GEN_HELP)]
    Gen(Common),
    /// Sample uniform spanning trees with Wilson's algorithm.
    #[command(after_help = SAMPLE_HELP)]
    Sample(Common),
    /// Spectrum of the simple random walk.
    #[command(after_help = SPECTRAL_HELP)]
    Spectral {
        #[command(flatten)]
        common: Common,
        /// Number of leading eigenvalues to report.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Cheeger constant against the spectral gap.
    #[command(after_help = CHEEGER_HELP)]
    Cheeger(Common),
    /// Good decomposition with its audit.
    #[command(after_help = DECOMPOSE_HELP)]
    Decompose(Common),
    /// Bubble sums and the diameter tail of the contracted graph.
    #[command(after_help = BUBBLE_HELP)]
    Bubble(Common),
    /// UST diameter against n.
    #[command(after_help = SCALING_HELP)]
    Scaling(Common),
    /// Tree paths between selected endpoints of each block.
    #[command(after_help = PATHS_HELP)]
    Paths(Common),
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args)]
struct Common {
    /// JSON config mirroring the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// complete, two-cliques-bridge, dense-gnp:P, complete-bipartite:A,B, star or file:PATH
    #[arg(long)]
    family: Option<Family>,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Defaults to n^1.5.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; required for randomized runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format `{s}`, expected csv or json")),
    }
}

impl Common {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(f) = &self.family {
            cfg.family = f.clone();
        }
        if let Some(n) = &self.n {
            cfg.n = n.clone();
        }
        cfg.delta = self.delta.unwrap_or(cfg.delta);
        cfg.eps = self.eps.unwrap_or(cfg.eps);
        cfg.beta = self.beta.or(cfg.beta);
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.seed = self.seed.or(cfg.seed);
        cfg.threads = self.threads.or(cfg.threads);
        cfg.out = self.out.clone().or(cfg.out);
        cfg.format = self.format.unwrap_or(cfg.format);
        if cfg.n.is_empty() {
            bail!("no vertex counts given");
        }
        Ok(cfg)
    }
}

/// Deterministic families need no seed; fix one so derived seeds are stable.
fn seed_optional(mut cfg: ExperimentConfig) -> ExperimentConfig {
    if !cfg.family.is_random() && cfg.seed.is_none() {
        cfg.seed = Some(0);
    }
    cfg
}

fn instance_graph(cfg: &ExperimentConfig, experiment: &str, n: usize) -> anyhow::Result<(u64, Graph)> {
    let seed = derive_tagged(cfg.master_seed()?, &format!("{experiment}/{}/{n}", cfg.family));
    let delta = cfg.family.is_random().then_some(cfg.delta);
    let g = generate(&cfg.family, n, delta, &mut RngStream::new(seed))?;
    Ok((seed, g))
}

fn run_gen(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let family = cfg.family.to_string();
    let mut graphs = Table::new("graphs", &["family", "n", "seed", "m", "min_degree", "max_degree", "delta", "degree_ok"]);
    let mut edges = Table::new("edges", &["n", "u", "v"]);
    for &n in &cfg.n {
        let (seed, g) = instance_graph(cfg, "gen", n)?;
        let degree_ok = g.min_degree() as f64 >= cfg.delta * n as f64 - 1e-9;
        graphs.push(vec![
            json!(family),
            json!(n),
            json!(seed),
            json!(g.m()),
            json!(g.min_degree()),
            json!(g.max_degree()),
            json!(cfg.delta),
            json!(degree_ok),
        ]);
        for (u, v) in g.edges() {
            edges.push(vec![json!(n), json!(u), json!(v)]);
        }
    }
    Ok(Report { experiment: "gen".into(), tables: vec![graphs, edges] })
}

fn run_sample(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let family = cfg.family.to_string();
    let mut trees = Table::new("trees", &["family", "n", "trial", "seed", "diameter", "root", "parents"]);
    for &n in &cfg.n {
        let (seed, g) = instance_graph(cfg, "sample", n)?;
        let net = Network64::from_graph(&g);
        let rows: Vec<Vec<Value>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::for_trial(seed, t as u64);
                let trial_seed = rng.seed();
                let tree = wilson(&net, &mut rng)?;
                let parents: Vec<String> =
                    tree.parents().iter().map(|p| p.map_or_else(|| "-".to_string(), |p| p.to_string())).collect();
                Ok(vec![
                    json!(family),
                    json!(n),
                    json!(t),
                    json!(trial_seed),
                    json!(tree.diameter()),
                    json!(tree.root()),
                    json!(parents.join(" ")),
                ])
            })
            .collect::<Result<_, Error>>()?;
        for row in rows {
            trees.push(row);
        }
    }
    Ok(Report { experiment: "sample".into(), tables: vec![trees] })
}

fn run_spectral(cfg: &ExperimentConfig, top: usize) -> anyhow::Result<Report> {
    let family = cfg.family.to_string();
    let mut spectra = Table::new("spectra", &["family", "n", "seed", "gap", "lambda2", "trace_p2", "path_method", "eigenvalues"]);
    for &n in &cfg.n {
        let (seed, g) = instance_graph(cfg, "spectral", n)?;
        let r = SpectralReport::build(&g, None, None, top)?;
        let eigenvalues: Vec<String> = r.lambda_k_list.iter().map(|x| x.to_string()).collect();
        spectra.push(vec![
            json!(family),
            json!(n),
            json!(seed),
            json!(r.gap),
            json!(r.lambda2),
            json!(r.trace_p2),
            json!(r.bounds.path_method),
            json!(eigenvalues.join(" ")),
        ]);
    }
    Ok(Report { experiment: "spectral".into(), tables: vec![spectra] })
}

/// The report plus whether every audit passed.
fn run_decompose(cfg: &ExperimentConfig) -> anyhow::Result<(Report, bool)> {
    let family = cfg.family.to_string();
    let mut summary = Table::new(
        "decompositions",
        &["family", "n", "seed", "k", "theta", "epsilon", "delta", "beta", "negligible_edges", "evil_count", "merges", "pass"],
    );
    let mut audit = Table::new("audit", &["n", "condition", "value", "threshold", "relation", "pass"]);
    let mut labels = Table::new("labels", &["n", "vertex", "block"]);
    let mut all_pass = true;
    for &n in &cfg.n {
        let (seed, g) = instance_graph(cfg, "decompose", n)?;
        let gd: GoodDecomposition = match good_decomposition(&g, cfg.eps, cfg.delta, cfg.beta) {
            Ok(gd) => gd,
            Err(Error::AuditFailed(gd)) => *gd,
            Err(e) => return Err(e.into()),
        };
        all_pass &= gd.passed();
        summary.push(vec![
            json!(family),
            json!(n),
            json!(seed),
            json!(gd.partition.k()),
            json!(gd.theta),
            json!(gd.epsilon),
            json!(gd.delta),
            json!(gd.beta),
            json!(gd.negligible_edges),
            json!(gd.evil_count),
            json!(gd.merges),
            json!(gd.passed()),
        ]);
        for c in &gd.audit {
            audit.push(vec![json!(n), json!(c.name), json!(c.value), json!(c.threshold), json!(c.relation), json!(c.pass)]);
        }
        for (v, &b) in gd.partition.labels().iter().enumerate() {
            labels.push(vec![json!(n), json!(v), json!(b)]);
        }
    }
    Ok((Report { experiment: "decompose".into(), tables: vec![summary, audit, labels] }, all_pass))
}

fn emit(cfg: &ExperimentConfig, report: &Report) -> anyhow::Result<()> {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let text = match cfg.format {
        Format::Csv => report.to_csv(timestamp),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.to_json(timestamp))?),
    };
    match &cfg.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn configure_threads(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("starting the worker pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let (common, top) = match &cli.command {
        Command::Spectral { common, top } => (common, *top),
        Command::Gen(c)
        | Command::Sample(c)
        | Command::Cheeger(c)
        | Command::Decompose(c)
        | Command::Bubble(c)
        | Command::Scaling(c)
        | Command::Paths(c) => (c, 0),
    };
    let cfg = common.resolve()?;
    configure_threads(&cfg)?;
    let mut status = ExitCode::SUCCESS;
    let (cfg, report) = match cli.command {
        Command::Gen(_) => {
            let cfg = seed_optional(cfg);
            let r = run_gen(&cfg)?;
            (cfg, r)
        }
        Command::Sample(_) => {
            let r = run_sample(&cfg)?;
            (cfg, r)
        }
        Command::Spectral { .. } => {
            let cfg = seed_optional(cfg);
            let r = run_spectral(&cfg, top)?;
            (cfg, r)
        }
        Command::Cheeger(_) => {
            let cfg = seed_optional(cfg);
            let r = experiments::run_cheeger_vs_gap(&cfg)?;
            (cfg, r)
        }
        Command::Decompose(_) => {
            let cfg = seed_optional(cfg);
            let (r, pass) = run_decompose(&cfg)?;
            if !pass {
                status = ExitCode::from(2);
            }
            (cfg, r)
        }
        Command::Bubble(_) => {
            let r = experiments::run_bubble_and_tail(&cfg)?;
            (cfg, r)
        }
        Command::Scaling(_) => {
            let r = experiments::run_diameter_scaling(&cfg)?;
            (cfg, r)
        }
        Command::Paths(_) => {
            let r = experiments::run_path_experiment(&cfg)?;
            (cfg, r)
        }
    };
    emit(&cfg, &report)?;
    Ok(status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
