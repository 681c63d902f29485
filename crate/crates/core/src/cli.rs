//! Command line front end. Every output carries a provenance header: a
//! `provenance` field in JSON, `#` comment lines in CSV and line formats.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cluster::{kp_audit, polymer_arena, truncated_log_xi, xi_brute, Model, XI_BRUTE_CAP, default_kp_rate};
use crate::dynamics::{escape_experiment, trial_rng, Chain, Kernel, Start};
use crate::engine::{choose_m, regime, AUTO_TRUNCATION_CAP, CountOptions, Counter, RcSampler, SamplerOptions};
use crate::error::{Error, Result};
use crate::exact::{self, z_potts_exact, z_rc_exact, Phase};
use crate::graph::{class_check, random_regular, ClassCheckOptions, Graph};
use crate::phase::{
    beta_c_solve, beta_c_table, f_dis_closed, f_ord_truncated, sample_w, ScalingCoefficients,
};
use crate::polymers::{enumerate_dis_polymers, enumerate_ord_polymers, Scope};

#[derive(Debug, Parser)]
#[command(name = "rcx", version, about = "Random cluster model: exact oracles, cluster expansions, sampling and dynamics")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph as JSON.
    Gen(GenArgs),
    /// Exact partition functions by enumeration.
    Exact(ExactArgs),
    /// List polymers up to a size.
    Polymers(PolymersArgs),
    /// Truncated cluster expansion of one polymer model.
    Expansion(ExpansionArgs),
    /// Approximate log Z from the two expansions.
    Count(CountArgs),
    /// Sample random cluster configurations or Potts colourings.
    Sample(SampleArgs),
    /// Run Markov chains and record phase trajectories.
    Dynamics(DynamicsArgs),
    /// Tree free energies, critical point and scaling variables.
    Phase(PhaseArgs),
    /// Expander class check.
    Check(CheckArgs),
    /// Run `count` over a grid of q and beta values.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    RandomRegular,
    Complete,
    Cycle,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "random-regular")]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub delta: usize,
}

/// `--graph` takes a JSON file, or one of `complete:N`, `cycle:N`,
/// `rr:N:DELTA[:SEED]`.
#[derive(Debug, Args)]
pub struct GraphArg {
    #[arg(long)]
    pub graph: String,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub g: GraphArg,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Also compute the Potts partition function (integer q).
    #[arg(long)]
    pub potts: bool,
}

#[derive(Debug, Args)]
pub struct PolymersArgs {
    #[command(flatten)]
    pub g: GraphArg,
    #[arg(long, value_parser = parse_model)]
    pub model: Model,
    #[arg(long)]
    pub m: usize,
    /// Print every polymer, not only counts.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    #[command(flatten)]
    pub g: GraphArg,
    #[arg(long, value_parser = parse_model)]
    pub model: Model,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub g: GraphArg,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Truncation override.
    #[arg(long)]
    pub m: Option<usize>,
    /// Skip the expander class check.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0.1)]
    pub delta_small: f64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub count: CountArgs,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Emit Potts colourings instead of edge sets.
    #[arg(long)]
    pub potts: bool,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub g: GraphArg,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, value_parser = parse_kernel, default_value = "cm")]
    pub kernel: Kernel,
    #[arg(long, value_parser = parse_start, default_value = "full")]
    pub start: Start,
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub record_every: u64,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    /// Emit escape statistics instead of trajectories.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub delta: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// `a:b:steps`, evaluated at `steps` evenly spaced points.
    #[arg(long)]
    pub beta_grid: Option<String>,
    #[arg(long)]
    pub solve_bc: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Compute α_k for 3 ≤ k ≤ K.
    #[arg(long)]
    pub alpha_k: Option<usize>,
    /// Draw this many scaling samples (uses α_k up to `--alpha-k`, default 6).
    #[arg(long)]
    pub sample_w: Option<usize>,
    /// β for α_k and scaling samples (default: the solved β_c).
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub g: GraphArg,
    #[arg(long, default_value_t = 0.1)]
    pub delta_small: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub g: GraphArg,
    /// Comma separated q values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    #[arg(long)]
    pub beta_grid: String,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

fn parse_model(s: &str) -> std::result::Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kernel(s: &str) -> std::result::Result<Kernel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_start(s: &str) -> std::result::Result<Start, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn load_graph(spec: &str) -> Result<Graph> {
    let path = Path::new(spec);
    if path.exists() {
        return Graph::from_json_str(&fs::read_to_string(path)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::invalid(format!("bad graph spec '{spec}'")))
    };
    match parts[0] {
        "complete" if parts.len() == 2 => Ok(Graph::complete(num(1)?)),
        "cycle" if parts.len() == 2 => Ok(Graph::cycle(num(1)?)),
        "rr" if parts.len() == 3 || parts.len() == 4 => {
            let seed = if parts.len() == 4 { num(3)? as u64 } else { 0 };
            random_regular(num(1)?, num(2)?, seed)
        }
        _ => Err(Error::invalid(format!(
            "'{spec}' is neither a graph file nor a spec (complete:N, cycle:N, rr:N:DELTA[:SEED])"
        ))),
    }
}

/// `a:b:steps` → `steps` evenly spaced values from `a` to `b`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::invalid(format!("bad grid '{s}', expected a:b:steps"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let k: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(match k {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    args: Vec<String>,
    seed: u64,
}

impl Provenance {
    fn comment_lines(&self) -> String {
        format!(
            "# {} {}\n# args: {}\n# seed: {}\n",
            self.tool,
            self.version,
            self.args.join(" "),
            self.seed
        )
    }
}

/// Rows of JSON cells, written as CSV or as an array of objects.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.replace([',', '\n'], ";"),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Table {
    fn csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(csv_cell).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect(),
        )
    }
}

enum Output {
    Report(Value),
    Table(Table),
    /// Preformatted lines (sample output).
    Lines(Vec<String>),
}

/// Finite floats as numbers, non-finite ones as strings.
fn num(x: f64) -> Value {
    if x.is_finite() { json!(x) } else { json!(x.to_string()) }
}

fn flatten_report(v: &Value) -> Table {
    match v {
        Value::Object(map) => {
            let columns: Vec<String> = map.keys().cloned().collect();
            let row = map
                .values()
                .map(|x| match x {
                    Value::Object(_) | Value::Array(_) => Value::String(x.to_string()),
                    other => other.clone(),
                })
                .collect();
            Table { columns, rows: vec![row] }
        }
        other => Table {
            columns: vec!["value".into()],
            rows: vec![vec![other.clone()]],
        },
    }
}

fn render(out: Output, format: Option<Format>, prov: &Provenance) -> Result<String> {
    Ok(match out {
        Output::Report(v) => match format.unwrap_or(Format::Json) {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json!({ "provenance": prov, "result": v }))?;
                s.push('\n');
                s
            }
            Format::Csv => prov.comment_lines() + &flatten_report(&v).csv(),
        },
        Output::Table(t) => match format.unwrap_or(Format::Csv) {
            Format::Csv => prov.comment_lines() + &t.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json!({ "provenance": prov, "result": t.json() }))?;
                s.push('\n');
                s
            }
        },
        Output::Lines(lines) => {
            let mut s = prov.comment_lines();
            for l in lines {
                s.push_str(&l);
                s.push('\n');
            }
            s
        }
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn count_options(a: &CountArgs) -> CountOptions {
    CountOptions {
        m: a.m,
        force: a.force,
        class: ClassCheckOptions::with_delta(a.delta_small),
        ..CountOptions::default()
    }
}

fn cmd_gen(a: &GenArgs, seed: u64) -> Result<Output> {
    let g = match a.kind {
        GraphKind::RandomRegular => random_regular(a.n, a.delta, seed)?,
        GraphKind::Complete => Graph::complete(a.n),
        GraphKind::Cycle => Graph::cycle(a.n),
    };
    Ok(Output::Report(to_value(&g.canonical().to_json())?))
}

fn cmd_exact(a: &ExactArgs) -> Result<Output> {
    let g = load_graph(&a.g.graph)?;
    let eta = a.eta.unwrap_or_else(|| exact::default_eta(0.1));
    let r = z_rc_exact(&g, a.q, a.beta, eta)?;
    let mut v = to_value(&r)?;
    if a.potts {
        if a.q.fract() != 0.0 || a.q < 1.0 {
            return Err(Error::invalid("--potts needs a positive integer q"));
        }
        v["log_z_potts"] = num(z_potts_exact(&g, a.q as u32, a.beta)?);
    }
    Ok(Output::Report(v))
}

fn cmd_polymers(a: &PolymersArgs) -> Result<Output> {
    let g = load_graph(&a.g.graph)?;
    let (sizes, list) = match a.model {
        Model::Dis => {
            let ps = enumerate_dis_polymers(&g, a.m)?;
            (ps.iter().map(|p| p.edges.len()).collect::<Vec<_>>(), to_value(&ps)?)
        }
        Model::Ord => {
            let ps = enumerate_ord_polymers(&g, a.m)?;
            (ps.iter().map(|p| p.edges.len()).collect::<Vec<_>>(), to_value(&ps)?)
        }
    };
    let mut by_size = vec![0usize; a.m + 1];
    sizes.iter().for_each(|&s| by_size[s] += 1);
    let mut v = json!({ "model": a.model, "m": a.m, "count": sizes.len(), "by_size": by_size });
    if a.list {
        v["polymers"] = list;
    }
    Ok(Output::Report(v))
}

fn cmd_expansion(a: &ExpansionArgs) -> Result<Output> {
    let g = load_graph(&a.g.graph)?;
    let t = truncated_log_xi(&g, a.q, a.beta, a.m, a.model)?;
    let arena = polymer_arena(&g, a.model, a.m, Scope::All)?;
    let lw = arena.log_weights(a.q, a.beta);
    let kp = kp_audit(&arena, g.n(), &lw, default_kp_rate(a.model, a.q, g.delta()), a.model, a.m.saturating_sub(1));
    let mut v = to_value(&t)?;
    v["kp"] = to_value(&kp)?;
    if arena.len() <= XI_BRUTE_CAP {
        v["log_xi_brute_arena"] = num(xi_brute(&arena, &lw)?);
    }
    Ok(Output::Report(v))
}

fn cmd_count(a: &CountArgs) -> Result<Output> {
    let g = load_graph(&a.g.graph)?;
    let r = crate::engine::log_z_tilde(&g, a.q, a.beta, a.eps, &count_options(a))?;
    Ok(Output::Report(to_value(&r)?))
}

fn cmd_sample(a: &SampleArgs, seed: u64) -> Result<Output> {
    let c = &a.count;
    let g = load_graph(&c.g.graph)?;
    let sampler = RcSampler::new(&g, c.q, c.beta, c.eps, &SamplerOptions {
        count: count_options(c),
        ..SamplerOptions::default()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = vec![format!(
        "# log_ztilde: {}  m: {}  kp: {}",
        sampler.report.log_ztilde,
        sampler.report.m,
        if sampler.verified() { "verified" } else { "UNVERIFIED" }
    )];
    if a.potts {
        if c.q.fract() != 0.0 {
            return Err(Error::invalid("--potts needs an integer q"));
        }
        for _ in 0..a.samples {
            lines.push(serde_json::to_string(&sampler.sample_potts(c.q as u32, &mut rng))?);
        }
    } else {
        for _ in 0..a.samples {
            lines.push(sampler.sample(&mut rng).to_hex());
        }
    }
    Ok(Output::Lines(lines))
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::Dis => "DIS",
        Phase::Ord => "ORD",
        Phase::Err => "ERR",
    }
}

fn cmd_dynamics(a: &DynamicsArgs, seed: u64) -> Result<Output> {
    let g = load_graph(&a.g.graph)?;
    if a.summary {
        let r = escape_experiment(&g, a.q, a.beta, a.kernel, a.start, a.trials, a.steps, a.eta, seed)?;
        return Ok(Output::Report(to_value(&r)?));
    }
    let every = a.record_every.max(1);
    let mut rows = Vec::new();
    for t in 0..a.trials {
        let mut rng = trial_rng(seed, t);
        let mut chain = Chain::new(&g, a.kernel, a.q, a.beta, a.start, &mut rng)?;
        for step in 0..=a.steps {
            if step > 0 {
                chain.step(&mut rng);
            }
            if step % every == 0 {
                rows.push(vec![json!(t), json!(step), json!(chain.edge_count()), json!(phase_name(chain.phase(a.eta)))]);
            }
        }
    }
    Ok(Output::Table(Table {
        columns: ["trial", "step", "edges", "phase"].map(String::from).to_vec(),
        rows,
    }))
}

fn cmd_phase(a: &PhaseArgs, seed: u64) -> Result<Output> {
    if let Some(grid) = &a.beta_grid {
        let mut rows = Vec::new();
        for beta in parse_grid(grid)? {
            let fd = f_dis_closed(a.q, beta, a.delta);
            let fo = if beta > 0.0 { Some(f_ord_truncated(a.q, beta, a.delta, a.m)?.value) } else { None };
            let reg = regime(a.q, a.delta, beta)?.regime;
            rows.push(vec![
                num(beta),
                num(fd),
                fo.map_or(Value::Null, num),
                fo.map_or(Value::Null, |f| num(f - fd)),
                to_value(&reg)?,
            ]);
        }
        return Ok(Output::Table(Table {
            columns: ["beta", "f_dis", "f_ord", "g", "regime"].map(String::from).to_vec(),
            rows,
        }));
    }
    let mut v = json!({ "q": a.q, "delta": a.delta, "m": a.m });
    let needs_bc = a.solve_bc || (a.beta.is_none() && (a.alpha_k.is_some() || a.sample_w.is_some()));
    let mut beta = a.beta;
    if needs_bc {
        let bc = beta_c_solve(a.q, a.delta, a.m, a.tol)?;
        beta = beta.or(Some(bc.beta_c));
        v["beta_c"] = to_value(&bc)?;
        let qs: Vec<f64> = (4..=12).map(|e| 10f64.powi(e)).collect();
        v["beta_c_table"] = to_value(&beta_c_table(&qs, a.delta, a.m, a.tol)?)?;
    }
    if a.alpha_k.is_some() || a.sample_w.is_some() {
        let beta = beta.expect("beta fixed above");
        let coeffs = ScalingCoefficients::compute(a.q, beta, a.delta, a.m, a.alpha_k.unwrap_or(6))?;
        v["beta"] = num(beta);
        v["alpha"] = to_value(&coeffs)?;
        if let Some(draws) = a.sample_w {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples = sample_w(&coeffs, a.q, a.delta, draws, &mut rng)?;
            let mut dev: Vec<f64> = samples.iter().map(|s| (s.q_value / a.q - 1.0).abs()).collect();
            dev.sort_by(f64::total_cmp);
            v["median_abs_q_ratio_minus_1"] = num(dev.get(dev.len() / 2).copied().unwrap_or(f64::NAN));
            v["samples"] = to_value(&samples)?;
        }
    }
    Ok(Output::Report(v))
}

fn cmd_check(a: &CheckArgs) -> Result<Output> {
    let g = load_graph(&a.g.graph)?;
    Ok(Output::Report(to_value(&class_check(&g, &ClassCheckOptions::with_delta(a.delta_small)))?))
}

const SWEEP_COLUMNS: [&str; 12] = [
    "point", "q", "beta", "regime", "m", "log_ztilde", "log_zdis_hat", "log_zord_hat", "tail_bound", "degraded", "kp_verified", "status",
];

/// Completed rows of an earlier run of the same sweep, keyed by
/// `(point, q, beta)` as written.
fn read_manifest(path: &Path) -> HashMap<(String, String, String), String> {
    let Ok(text) = fs::read_to_string(path) else {
        return HashMap::new();
    };
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("point,"))
        .filter_map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            (cells.len() == SWEEP_COLUMNS.len() && cells[11] == "ok")
                .then(|| ((cells[0].to_string(), cells[1].to_string(), cells[2].to_string()), l.to_string()))
        })
        .collect()
}

fn cmd_sweep(a: &SweepArgs, out: Option<&Path>, prov: &Provenance) -> Result<String> {
    let g = load_graph(&a.g.graph)?;
    let betas = parse_grid(&a.beta_grid)?;
    let points: Vec<(f64, f64)> = a.q.iter().flat_map(|&q| betas.iter().map(move |&b| (q, b))).collect();
    let m = match a.m {
        Some(m) => m,
        None => {
            let qmin = a.q.iter().copied().fold(f64::INFINITY, f64::min);
            choose_m(g.n(), a.eps, qmin, g.delta()).min(AUTO_TRUNCATION_CAP)
        }
    };
    let opts = CountOptions {
        m: Some(m),
        force: a.force,
        ..CountOptions::default()
    };
    let done = out.map(read_manifest).unwrap_or_default();
    let counter = Counter::new(&g, m, &opts)?;
    let rows: Vec<String> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(q, beta))| {
            let key = (i.to_string(), num_str(q), num_str(beta));
            if let Some(line) = done.get(&key) {
                return line.clone();
            }
            let cells: Vec<Value> = match counter.report(q, beta, a.eps) {
                Ok(r) => vec![
                    json!(i),
                    num(q),
                    num(beta),
                    to_value(&r.regime).unwrap_or(Value::Null),
                    json!(r.m),
                    num(r.log_ztilde),
                    r.log_zdis_hat.map_or(Value::Null, num),
                    r.log_zord_hat.map_or(Value::Null, num),
                    num(r.tail_bound),
                    json!(r.degraded),
                    json!(r.kp_verified()),
                    json!("ok"),
                ],
                Err(e) => {
                    let mut c = vec![json!(i), num(q), num(beta)];
                    c.extend(std::iter::repeat_n(Value::Null, 8));
                    c.push(json!(format!("error: {e}")));
                    c
                }
            };
            cells.iter().map(csv_cell).collect::<Vec<_>>().join(",")
        })
        .collect();
    let mut s = prov.comment_lines();
    s.push_str(&SWEEP_COLUMNS.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    Ok(s)
}

fn num_str(x: f64) -> String {
    csv_cell(&num(x))
}

fn run(cli: &Cli, args: Vec<String>) -> Result<()> {
    if let Some(t) = cli.threads {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let prov = Provenance {
        tool: "rcx",
        version: env!("CARGO_PKG_VERSION"),
        args,
        seed: cli.seed,
    };
    let out = cli.out.as_deref();
    let output = match &cli.command {
        Command::Gen(a) => {
            // graph files stay loadable by every consumer; provenance is an extra field
            let mut v = match cmd_gen(a, cli.seed)? {
                Output::Report(v) => v,
                _ => unreachable!(),
            };
            v["provenance"] = to_value(&prov)?;
            let mut s = serde_json::to_string(&v)?;
            s.push('\n');
            return write_output(out, &s);
        }
        Command::Sweep(a) => return write_output(out, &cmd_sweep(a, out, &prov)?),
        Command::Exact(a) => cmd_exact(a)?,
        Command::Polymers(a) => cmd_polymers(a)?,
        Command::Expansion(a) => cmd_expansion(a)?,
        Command::Count(a) => cmd_count(a)?,
        Command::Sample(a) => cmd_sample(a, cli.seed)?,
        Command::Dynamics(a) => cmd_dynamics(a, cli.seed)?,
        Command::Phase(a) => cmd_phase(a, cli.seed)?,
        Command::Check(a) => cmd_check(a)?,
    };
    write_output(out, &render(output, cli.format, &prov)?)
}

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 on success, 2 on invalid input, 3 when a cap or budget stops the run.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let args = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match run(&cli, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
