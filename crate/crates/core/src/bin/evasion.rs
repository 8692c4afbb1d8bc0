use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use evasion::cctree::{self, CCTree, TreeVerifyMode};
use evasion::container::{self, ContainerFamily, ContainerParams, VerifyMode};
use evasion::error::Error;
use evasion::evasive::{self, EvasiveParams};
use evasion::experiments::{
    self, AlphaConfig, CampaignConfig, Process, SupersatConfig, TreeConfig,
};
use evasion::field::FieldCtx;
use evasion::geom::PointSet;
use evasion::hyper::Hypergraph;
use evasion::report::{self, Format};

#[derive(Parser)]
#[command(
    name = "evasion",
    version,
    about = "Evasive sets, containers and container-clique trees over F_q"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// α of the collinear-triple hypergraph on p-random subsets of F_q^2
    Alpha(Opts),
    /// Triple counts against the supersaturation bound, plus Δ certificates
    Supersat(Opts),
    /// Build and verify a container-clique tree
    Cctree(Opts),
    /// Campaign of the random-algebraic evasive construction
    Evasive(Opts),
    /// Count general-position subsets of F_q^n
    CountGp(Opts),
    /// Slice bound, Chow dimension and degree schedule
    Bounds(Opts),
    /// Check a point set, container family or tree file
    Verify(Opts),
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// key=value file; flags win over it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long = "c-prime")]
    c_prime: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// collinear or krset
    #[arg(long)]
    process: Option<String>,
    /// sampled independent sets for cover checks
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    attempts: Option<usize>,
    /// paths traced when a collinear tree hits the node cap
    #[arg(long)]
    traces: Option<usize>,
    #[arg(long = "max-nodes")]
    max_nodes: Option<usize>,
    /// where `cctree` writes the tree
    #[arg(long = "tree-out")]
    tree_out: Option<PathBuf>,
    /// file checked by `verify`
    #[arg(long)]
    input: Option<PathBuf>,
    /// evasive, containers or cctree
    #[arg(long)]
    what: Option<String>,
    /// hypergraph file for `verify --what containers`
    #[arg(long)]
    hypergraph: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_)
            | Error::Parse(_)
            | Error::NotPrime(_)
            | Error::Unsupported(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Flag values merged over the config file.
struct Merged {
    opts: Opts,
    file: BTreeMap<String, String>,
}

impl Merged {
    fn new(opts: Opts) -> Res<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = &opts.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            for line in text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
            {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("bad config line `{line}`")))?;
                file.insert(k.trim().replace('_', "-"), v.trim().to_string());
            }
        }
        Ok(Merged { opts, file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Res<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("bad value `{v}` for {key}"))),
            None => Ok(None),
        }
    }

    fn need<T: FromStr>(&self, flag: Option<T>, key: &str) -> Res<T> {
        self.get(flag, key)?
            .ok_or_else(|| Failure::Usage(format!("--{key} is required")))
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Res<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    fn path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone()
            .or_else(|| self.file.get(key).map(PathBuf::from))
    }

    fn format(&self) -> Res<Format> {
        let f: String = self.or(self.opts.format.clone(), "format", "json".to_string())?;
        Format::from_str(&f).map_err(Failure::from)
    }
}

fn emit<T: Serialize>(m: &Merged, rep: &T, rows_key: &str, columns: &[&str]) -> Res<()> {
    let text = match m.format()? {
        Format::Json => report::to_json(rep)?,
        Format::Csv => report::to_csv(rep, rows_key, columns)?,
    };
    match m.path(&m.opts.out, "out") {
        Some(path) => report::write(&path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn field(q: u32) -> Res<FieldCtx> {
    Ok(FieldCtx::from_order(q as u64)?)
}

fn alpha(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let cfg = AlphaConfig::new(
        m.need(o.q, "q")?,
        m.need(o.p, "p")?,
        m.or(o.trials, "trials", 20)?,
        m.need(o.seed, "seed")?,
    );
    let rep = experiments::run_alpha(&cfg)?;
    emit(
        m,
        &rep,
        "rows",
        &[
            "alpha", "cap", "exact", "moment", "nodes", "s_size", "trial",
        ],
    )?;
    Ok(rep.sandwich_pass)
}

fn supersat(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let cfg = SupersatConfig {
        qs: vec![m.need(o.q, "q")?],
        densities: (1..=10).map(|i| i as f64 / 10.0).collect(),
        samples: m.or(o.trials, "trials", 20)?,
        seed: m.need(o.seed, "seed")?,
        theta: m.or(o.theta, "theta", 1.0)?,
        c: m.or(o.c, "c", 0.01)?,
    };
    let rep = experiments::run_supersat_sweep(&cfg)?;
    emit(
        m,
        &rep,
        "rows",
        &[
            "bound", "count", "density", "m", "pass", "q", "ratio", "sample",
        ],
    )?;
    Ok(rep.all_above_bound && rep.all_edges_valid)
}

fn tree(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let q = m.need(o.q, "q")?;
    let seed = m.need(o.seed, "seed")?;
    let process: String = m.or(o.process.clone(), "process", "collinear".into())?;
    let mut cfg = match Process::from_str(&process)? {
        Process::Collinear => TreeConfig::collinear(q, seed),
        Process::Krset => TreeConfig::krset(
            q,
            m.or(o.n, "n", 2)?,
            m.or(o.k, "k", 1)?,
            m.or(o.r, "r", 3)?,
            m.or(o.theta, "theta", 5.0)?,
            seed,
        ),
    };
    cfg.eps = m.or(o.eps, "eps", cfg.eps)?;
    cfg.c = m.or(o.c, "c", cfg.c)?;
    cfg.c_prime = m.or(o.c_prime, "c-prime", cfg.c_prime)?;
    cfg.samples = m.or(o.samples, "samples", cfg.samples)?;
    cfg.max_nodes = m.or(o.max_nodes, "max-nodes", cfg.max_nodes)?;
    cfg.trace_samples = m.or(o.traces, "traces", 0)?;
    let (rep, tree) = experiments::run_cctree(&cfg)?;
    if let (Some(path), Some(t)) = (m.path(&o.tree_out, "tree-out"), tree) {
        report::write(&path, &t.to_text(cfg.r)?)?;
    }
    if let Some(e) = &rep.error {
        eprintln!("{e}");
    }
    emit(m, &rep, "log", &[])?;
    Ok(rep.pass())
}

fn evasive_campaign(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let cfg = CampaignConfig {
        n: m.need(o.n, "n")?,
        k: m.need(o.k, "k")?,
        d: m.or(o.d, "d", 1)?,
        q: m.need(o.q, "q")?,
        trials: m.or(o.trials, "trials", 50)?,
        seed: m.need(o.seed, "seed")?,
        attempts: m.or(o.attempts, "attempts", 1)?,
    };
    let rep = experiments::run_evasive_campaign(&cfg)?;
    emit(m, &rep, "rows", &[])?;
    Ok(rep.all_within_slice_bound)
}

fn count_gp(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let ctx = field(m.need(o.q, "q")?)?;
    let n = m.or(o.n, "n", 2)?;
    let count = experiments::count_general_position(&ctx, n)?;
    let oracle = experiments::count_general_position_oracle(&ctx, n).ok();
    let agree = oracle.map_or(true, |v| v == count);
    let at_least = count >= 1u128 << ctx.q();
    let rep = json!({
        "q": ctx.q(), "n": n, "count": count.to_string(),
        "oracle": oracle.map(|v| v.to_string()),
        "agree": agree, "at_least_2_pow_q": at_least,
    });
    emit(m, &rep, "rows", &[])?;
    Ok(agree && at_least)
}

fn bounds(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let n = m.need(o.n, "n")?;
    let k = m.need(o.k, "k")?;
    let d = m.or(o.d, "d", 1)?;
    let mut rep = BTreeMap::new();
    if k < n {
        rep.insert(
            "chow_dim",
            json!(evasive::chow_dim(d as u64, k as u64, n as u64).to_string()),
        );
    }
    let s = evasive::degree_schedule(n, k, d)?;
    rep.insert("degrees", json!(s.degrees));
    rep.insert("r_value", json!(s.r_value.to_string()));
    rep.insert("degree_product", json!(s.degree_product.to_string()));
    if let Ok(t) = evasive::twisted_degree_bound(n, k, d) {
        rep.insert("twisted_degree_bound", json!(t.to_string()));
    }
    if let (Some(r), Some(q)) = (m.get(o.r, "r")?, m.get(o.q, "q")?) {
        let p = EvasiveParams { n, k, d, r, q };
        p.validate()?;
        rep.insert("slice_bound", json!(evasive::slice_bound(&p).to_string()));
    }
    emit(m, &rep, "rows", &[])?;
    Ok(true)
}

fn verify(m: &Merged) -> Res<bool> {
    let o = &m.opts;
    let input = m
        .path(&o.input, "input")
        .ok_or_else(|| Failure::Usage("--input is required".into()))?;
    let text = std::fs::read_to_string(&input)
        .map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let what: String = m.need(o.what.clone(), "what")?;
    match what.as_str() {
        "evasive" => {
            let s = PointSet::parse_text(&text)?;
            let params = EvasiveParams {
                n: s.space().n(),
                k: m.need(o.k, "k")?,
                d: m.or(o.d, "d", 1)?,
                r: m.need(o.r, "r")?,
                q: s.space().q(),
            };
            let v = evasive::is_evasive(&s, &params)?;
            let rep = json!({
                "size": s.len(), "evasive": v.evasive, "r": v.r,
                "max_intersection": v.max_intersection,
                "witness_kind": v.witness_kind(), "witness": v.witness_encoding(),
                "slice_bound": evasive::slice_bound(&params).to_string(),
            });
            emit(m, &rep, "rows", &[])?;
            Ok(v.evasive)
        }
        "containers" => {
            let hpath = m
                .path(&o.hypergraph, "hypergraph")
                .ok_or_else(|| Failure::Usage("--hypergraph is required".into()))?;
            let htext =
                std::fs::read_to_string(&hpath).map_err(|e| Failure::Usage(e.to_string()))?;
            let h = Hypergraph::parse_text(&htext)?;
            let params = ContainerParams::new(m.need(o.tau, "tau")?, m.need(o.c, "c")?);
            let fam = ContainerFamily::parse_text(&text, &h, params)?;
            let mode = if h.num_vertices() <= 24 {
                VerifyMode::Exhaustive
            } else {
                VerifyMode::Sampled {
                    samples: m.or(o.samples, "samples", 10_000)?,
                    seed: m.or(o.seed, "seed", 0)?,
                }
            };
            let rep = container::verify_containers(&h, &fam, mode)?;
            emit(m, &rep, "rows", &[])?;
            Ok(rep.a_pass && rep.c_pass)
        }
        "cctree" => {
            let t = CCTree::parse_text(&text)?;
            let ctx = field(m.need(o.q, "q")?)?;
            let h = cctree::krset_hypergraph(
                &ctx,
                m.or(o.n, "n", 2)?,
                m.or(o.k, "k", 1)?,
                m.or(o.r, "r", 3)?,
            )?;
            let mode = if h.num_vertices() <= 24 {
                TreeVerifyMode::Exhaustive
            } else {
                TreeVerifyMode::Sampled {
                    samples: m.or(o.samples, "samples", 10_000)?,
                    seed: m.or(o.seed, "seed", 0)?,
                }
            };
            let rep = cctree::verify_cctree(&t, &h, mode)?;
            emit(m, &rep, "rows", &[])?;
            Ok(rep.pass())
        }
        other => Err(Failure::Usage(format!("unknown --what `{other}`"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (opts, run): (Opts, fn(&Merged) -> Res<bool>) = match cli.cmd {
        Cmd::Alpha(o) => (o, alpha),
        Cmd::Supersat(o) => (o, supersat),
        Cmd::Cctree(o) => (o, tree),
        Cmd::Evasive(o) => (o, evasive_campaign),
        Cmd::CountGp(o) => (o, count_gp),
        Cmd::Bounds(o) => (o, bounds),
        Cmd::Verify(o) => (o, verify),
    };
    let result = Merged::new(opts).and_then(|m| run(&m));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
