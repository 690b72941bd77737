//! The `orgmine` command line: `mine`, `gen`, `eval` and `sweep`.
//!
//! Every command writes a JSON manifest next to its main output holding
//! the full configuration, so a run can be repeated with `--config`.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::benchgen::{self, BenchmarkParams, GroundTruth};
use crate::error::{Error, Result};
use crate::eval::{self, EvalReport};
use crate::graph::{load_graph_files, write_graph_files, AttributeKind, AttributeSchema, NodeId};
use crate::kernel::Subspace;
use crate::pipeline::{self, MineConfig, MineStats, Organization};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;
/// The run finished and wrote its outputs, but some pair hit the
/// alternation cap.
pub const EXIT_CAPPED: i32 = 5;

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_) | Error::Subspace(_) => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "orgmine", version, about = "Mine attribute-aware community organizations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine a diverse organization around concerned attributes.
    Mine(MineArgs),
    /// Generate a synthetic attributed benchmark with planted ground truth.
    Gen(GenArgs),
    /// Score an organization against ground truth with the Q indicator.
    Eval(EvalArgs),
    /// Run gen, mine and eval across values of one benchmark parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GraphInput {
    /// Directory holding `edges.txt`, `nodes.tsv` and `schema.toml`.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

impl GraphInput {
    fn resolve(&self) -> Result<(PathBuf, PathBuf, PathBuf)> {
        let pick = |explicit: &Option<PathBuf>, file: &str| {
            explicit
                .clone()
                .or_else(|| self.dir.as_ref().map(|d| d.join(file)))
                .ok_or_else(|| Error::Config(format!("give --{} or --dir", file.split('.').next().unwrap_or(file))))
        };
        Ok((
            pick(&self.edges, EDGES_FILE)?,
            pick(&self.nodes, NODES_FILE)?,
            pick(&self.schema, SCHEMA_FILE)?,
        ))
    }
}

pub const EDGES_FILE: &str = "edges.txt";
pub const NODES_FILE: &str = "nodes.tsv";
pub const SCHEMA_FILE: &str = "schema.toml";
pub const TRUTH_FILE: &str = "truth.txt";
pub const GEN_MANIFEST_FILE: &str = "manifest.json";

/// Overrides for [`MineConfig`]; unset flags keep the base value.
#[derive(Debug, Clone, Default, Args)]
pub struct MineFlags {
    /// Backbone size parameter (percent of the mean edge difference).
    #[arg(long)]
    pub pi: Option<f64>,
    #[arg(long)]
    pub beta_c: Option<f64>,
    #[arg(long)]
    pub beta_d: Option<f64>,
    /// Kernel scale multiplier.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub min_seed_size: Option<usize>,
    #[arg(long)]
    pub max_alternations: Option<usize>,
    /// Seed for label propagation.
    #[arg(long)]
    pub lpa_seed: Option<u64>,
    /// Converge seeds in parallel (skips the visited-node shortcut).
    #[arg(long)]
    pub parallel: bool,
}

impl MineFlags {
    fn apply(&self, mut config: MineConfig) -> MineConfig {
        if let Some(pi) = self.pi {
            config.seeding.pi = pi;
        }
        if let Some(b) = self.beta_c {
            config.diversity.beta_c = b;
        }
        if let Some(b) = self.beta_d {
            config.diversity.beta_d = b;
        }
        if let Some(theta) = self.theta {
            config.kernel.theta = theta;
        }
        if let Some(s) = self.min_seed_size {
            config.seeding.min_seed_size = s;
        }
        if let Some(a) = self.max_alternations {
            config.search.max_alternations = a;
        }
        if let Some(s) = self.lpa_seed {
            config.seeding.rng_seed = s;
        }
        config.parallel |= self.parallel;
        config
    }
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Concerned attributes: comma-separated names or indices.
    #[arg(long, value_delimiter = ',')]
    pub concerned: Vec<String>,
    /// Organization output (JSON lines); the manifest goes to
    /// `<out>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Manifest of an earlier mine run. Its configuration is the base for
    /// the flags; its inputs and concerned set apply when none are given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: MineFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Numerical,
    Binary,
    Categorical,
}

impl From<KindArg> for AttributeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Numerical => AttributeKind::Numerical,
            KindArg::Binary => AttributeKind::Binary,
            KindArg::Categorical => AttributeKind::Categorical,
        }
    }
}

/// Overrides for [`BenchmarkParams`]; unset flags keep the base value.
#[derive(Debug, Clone, Default, Args)]
pub struct GenFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d_avg: Option<f64>,
    #[arg(long)]
    pub d_max: Option<usize>,
    #[arg(long)]
    pub c_min: Option<usize>,
    /// Defaults to twice `c_min`.
    #[arg(long)]
    pub c_max: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub tau1: Option<f64>,
    #[arg(long)]
    pub tau2: Option<f64>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "type", value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub binary_background: Option<f64>,
    #[arg(long)]
    pub categories: Option<usize>,
    /// Root seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl GenFlags {
    fn apply(&self, mut p: BenchmarkParams) -> BenchmarkParams {
        macro_rules! set {
            ($($flag:ident => $field:expr),*) => {
                $(if let Some(v) = self.$flag { $field = v.into(); })*
            };
        }
        set!(n => p.n, d_avg => p.d_avg, d_max => p.d_max, mu => p.mu, tau1 => p.tau1, tau2 => p.tau2,
             r => p.r, t => p.t, p => p.p, kind => p.kind, delta => p.noise.delta,
             binary_background => p.noise.binary_background, categories => p.noise.categories, seed => p.rng_seed);
        if let Some(c_min) = self.c_min {
            p.c_min = c_min;
            p.c_max = 2 * c_min;
        }
        if let Some(c_max) = self.c_max {
            p.c_max = c_max;
        }
        p
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output directory for graph, schema, ground truth and manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Manifest of an earlier gen run to take the parameters from.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Size of the suggested concerned set recorded in the manifest.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub flags: GenFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth file (`ids | dims` per line).
    #[arg(long)]
    pub truth: PathBuf,
    /// Organization: JSON lines from `mine`, or the ground-truth format.
    #[arg(long)]
    pub org: PathBuf,
    /// Concerned attributes; defaults to those in the organization's
    /// manifest, or to none (every planted community counts).
    #[arg(long, value_delimiter = ',')]
    pub concerned: Vec<String>,
    /// Schema used to resolve concerned attribute names.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Write the report as JSON here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Also write a one-row CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    N,
    Mu,
    CMin,
    R,
    T,
    P,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Runs per value; run `i` uses root seed + i.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// CSV output; rows already present are skipped.
    #[arg(long)]
    pub out: PathBuf,
    /// Concerned set size picked from the planted subspaces.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Start from the desk-scale benchmark instead of the full defaults.
    #[arg(long)]
    pub desk_scale: bool,
    /// Also write a matplotlib script plotting Q against the parameter.
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
    #[command(flatten)]
    pub gen: GenFlags,
    #[command(flatten)]
    pub mine: MineFlags,
}

/// One organization file record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub members: Vec<NodeId>,
    /// Dimension names.
    pub subspace: Vec<String>,
    pub dims: Vec<usize>,
    pub fitness: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MineManifest {
    pub command: String,
    pub edges: PathBuf,
    pub nodes: PathBuf,
    pub schema: PathBuf,
    pub concerned: Vec<String>,
    pub concerned_dims: Vec<usize>,
    pub config: MineConfig,
    pub stats: MineStats,
    pub pairs: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenManifest {
    pub command: String,
    pub params: BenchmarkParams,
    pub nodes: usize,
    pub edges: usize,
    pub communities: usize,
    pub mean_degree: f64,
    pub empirical_mixing: f64,
    pub degree_adjustments: usize,
    /// A concerned set drawn from one planted subspace (names).
    pub suggested_concerned: Vec<String>,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepManifest {
    pub command: String,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub seeds: u64,
    pub k: usize,
    pub base: BenchmarkParams,
    pub config: MineConfig,
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Mine(args) => cmd_mine(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn manifest_path(org: &Path) -> PathBuf {
    sidecar(org, ".manifest.json")
}

/// Resolves names or indices against `schema`. Unknown names are config
/// errors naming the offender.
pub fn resolve_concerned(tokens: &[String], schema: &AttributeSchema) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|tok| {
            let tok = tok.trim();
            schema
                .index_of(tok)
                .or_else(|| tok.parse::<usize>().ok().filter(|&i| i < schema.len()))
                .ok_or_else(|| Error::Config(format!("unknown concerned attribute `{tok}`")))
        })
        .collect()
}

pub fn cmd_mine(args: &MineArgs) -> Result<i32> {
    let started = Instant::now();
    let previous = args.config.as_deref().map(read_json::<MineManifest>).transpose()?;
    let no_input = args.input.dir.is_none()
        && args.input.edges.is_none()
        && args.input.nodes.is_none()
        && args.input.schema.is_none();
    let (edges, nodes, schema) = match &previous {
        Some(m) if no_input => (m.edges.clone(), m.nodes.clone(), m.schema.clone()),
        _ => args.input.resolve()?,
    };
    let base = previous.as_ref().map(|m| m.config).unwrap_or_default();
    let config = args.flags.apply(base);
    config.validate()?;
    let tokens = match &previous {
        Some(m) if args.concerned.is_empty() => m.concerned.clone(),
        _ => args.concerned.clone(),
    };
    if tokens.is_empty() {
        return Err(Error::Config("--concerned needs at least one attribute".into()));
    }
    let graph = load_graph_files(&edges, &nodes, &schema)?.graph;
    let dims = resolve_concerned(&tokens, graph.schema())?;
    let concerned = Subspace::new(dims, graph.attribute_count())?;
    let organization = pipeline::mine(&graph, &concerned, &config)?;

    write_organization(&organization, graph.schema(), &args.out)?;
    let stats = organization.provenance.stats.clone();
    let manifest = MineManifest {
        command: "mine".into(),
        edges,
        nodes,
        schema,
        concerned: concerned
            .dims()
            .iter()
            .map(|&d| graph.schema().dim(d).name.clone())
            .collect(),
        concerned_dims: concerned.dims().to_vec(),
        config,
        stats: stats.clone(),
        pairs: organization.len(),
        wall_ms: started.elapsed().as_millis(),
    };
    write_json(&manifest_path(&args.out), &manifest)?;
    info!("wrote {} pairs to {}", organization.len(), args.out.display());
    if stats.capped > 0 {
        warn!("{} pair(s) stopped at the alternation cap", stats.capped);
        return Ok(EXIT_CAPPED);
    }
    Ok(EXIT_OK)
}

pub fn organization_records(organization: &Organization, schema: &AttributeSchema) -> Vec<PairRecord> {
    organization
        .pairs
        .iter()
        .map(|p| PairRecord {
            members: p.community.clone(),
            subspace: p.subspace.dims().iter().map(|&d| schema.dim(d).name.clone()).collect(),
            dims: p.subspace.dims().to_vec(),
            fitness: p.fitness,
        })
        .collect()
}

pub fn write_organization(organization: &Organization, schema: &AttributeSchema, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    for record in organization_records(organization, schema) {
        serde_json::to_writer(&mut out, &record)?;
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Members of a community and, when known, the indices of its subspace.
pub type DetectedPair = (Vec<NodeId>, Option<Vec<usize>>);

/// Reads an organization in either JSON-lines or ground-truth format.
pub fn read_organization(path: &Path) -> Result<Vec<DetectedPair>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    if first.is_some_and(|l| l.starts_with('{')) {
        let name = path.display().to_string();
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let record: PairRecord =
                    serde_json::from_str(l).map_err(|e| Error::parse(&name, i + 1, e.to_string()))?;
                let mut members = record.members;
                members.sort_unstable();
                members.dedup();
                Ok((members, Some(record.dims)))
            })
            .collect()
    } else {
        let truth = GroundTruth::read(text.as_bytes(), &path.display().to_string())?;
        Ok(truth
            .communities
            .into_iter()
            .zip(truth.subspaces)
            .map(|(c, s)| (c, Some(s.dims().to_vec())))
            .collect())
    }
}

pub fn read_truth(path: &Path) -> Result<GroundTruth> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    GroundTruth::read(BufReader::new(file), &path.display().to_string())
}

pub fn cmd_gen(args: &GenArgs) -> Result<i32> {
    let started = Instant::now();
    let base = match &args.config {
        Some(path) => read_json::<GenManifest>(path)?.params,
        None => BenchmarkParams::default(),
    };
    let params = args.flags.apply(base);
    params.validate()?;
    let bench = benchgen::generate(&params)?;
    let k = args.k.min(params.t);
    if k < args.k {
        warn!("suggested concerned set shrunk to the planted subspace size {k}");
    }
    let concerned = benchgen::pick_concerned(&bench.truth, k, params.rng_seed)?;

    let dir = &args.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_graph_files(
        &bench.graph,
        &dir.join(EDGES_FILE),
        &dir.join(NODES_FILE),
        &dir.join(SCHEMA_FILE),
    )?;
    let truth_path = dir.join(TRUTH_FILE);
    let mut out = create(&truth_path)?;
    bench
        .truth
        .write(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(&truth_path, e))?;

    let schema = bench.graph.schema();
    let manifest = GenManifest {
        command: "gen".into(),
        params,
        nodes: bench.graph.node_count(),
        edges: bench.graph.edge_count(),
        communities: bench.truth.len(),
        mean_degree: bench.mean_degree(),
        empirical_mixing: bench.empirical_mixing(),
        degree_adjustments: bench.adjustments,
        suggested_concerned: concerned.dims().iter().map(|&d| schema.dim(d).name.clone()).collect(),
        wall_ms: started.elapsed().as_millis(),
    };
    write_json(&dir.join(GEN_MANIFEST_FILE), &manifest)?;
    info!("wrote benchmark to {}", dir.display());
    Ok(EXIT_OK)
}

/// Q of `detected` against the planted communities containing `concerned`,
/// with subspace agreement when the detected subspaces are known.
pub fn score(truth: &GroundTruth, concerned: &[usize], detected: &[DetectedPair]) -> Result<EvalReport> {
    let indices = eval::ground_truth_indices(truth, concerned);
    let reference: Vec<Vec<NodeId>> = indices.iter().map(|&c| truth.communities[c].clone()).collect();
    let communities: Vec<Vec<NodeId>> = detected.iter().map(|(c, _)| c.clone()).collect();
    let mut report = eval::quality_q(&reference, &communities)?;
    let mined: Option<Vec<Subspace>> = detected
        .iter()
        .map(|(_, dims)| {
            dims.as_ref()
                .and_then(|d| Subspace::new(d.iter().copied(), usize::MAX).ok())
        })
        .collect();
    if let Some(mined) = mined {
        let planted: Vec<&Subspace> = indices.iter().map(|&c| &truth.subspaces[c]).collect();
        report.subspace_jaccard = eval::subspace_agreement(&report, &planted, &mined.iter().collect::<Vec<_>>());
    }
    Ok(report)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<i32> {
    let truth = read_truth(&args.truth)?;
    let detected = read_organization(&args.org)?;
    let concerned: Vec<usize> = if !args.concerned.is_empty() {
        match &args.schema {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                resolve_concerned(&args.concerned, &AttributeSchema::from_toml(&text)?)?
            }
            None => args
                .concerned
                .iter()
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("`{t}` is not an index; pass --schema to use names")))
                })
                .collect::<Result<_>>()?,
        }
    } else if manifest_path(&args.org).exists() {
        read_json::<MineManifest>(&manifest_path(&args.org))?.concerned_dims
    } else {
        Vec::new()
    };
    let report = score(&truth, &concerned, &detected)?;
    match &args.json {
        Some(path) => write_json(path, &report)?,
        None => match writeln!(std::io::stdout().lock(), "{}", report.to_json()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Error::io("<stdout>", e)),
            _ => {}
        },
    }
    if let Some(path) = &args.csv {
        report.write_csv(create(path)?)?;
    }
    info!("Q = {}", report.q);
    Ok(EXIT_OK)
}

fn sweep_params(base: &BenchmarkParams, param: SweepParam, value: f64, seed: u64) -> Result<BenchmarkParams> {
    let mut p = BenchmarkParams {
        rng_seed: base.rng_seed.wrapping_add(seed),
        ..*base
    };
    let count = || {
        if value >= 0.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(Error::Config(format!("{param:?} needs a whole number, got {value}")))
        }
    };
    match param {
        SweepParam::N => p.n = count()?,
        SweepParam::Mu => p.mu = value,
        SweepParam::CMin => {
            p.c_min = count()?;
            p.c_max = 2 * p.c_min;
        }
        SweepParam::R => p.r = count()?,
        SweepParam::T => p.t = count()?,
        SweepParam::P => p.p = value,
    }
    p.validate()?;
    Ok(p)
}

/// One sweep run: generate, pick concerned, mine, score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub seed: u64,
    pub q: f64,
    pub n_truth: usize,
    pub n_detected: usize,
    pub wall_ms: u128,
}

pub fn sweep_point(params: &BenchmarkParams, k: usize, config: &MineConfig) -> Result<(EvalReport, u128)> {
    let bench = benchgen::generate(params)?;
    let concerned = benchgen::pick_concerned(&bench.truth, k, params.rng_seed)?;
    let started = Instant::now();
    let organization = pipeline::mine(&bench.graph, &concerned, config)?;
    let wall_ms = started.elapsed().as_millis();
    Ok((eval::evaluate_organization(&bench.truth, &organization)?, wall_ms))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let base = if args.desk_scale {
        BenchmarkParams::desk_scale()
    } else {
        BenchmarkParams::default()
    };
    let base = args.gen.apply(base);
    let config = args.mine.apply(MineConfig::default());
    config.validate()?;
    let manifest = SweepManifest {
        command: "sweep".into(),
        param: args.param,
        values: args.values.clone(),
        seeds: args.seeds,
        k: args.k,
        base,
        config,
    };
    write_json(&manifest_path(&args.out), &manifest)?;

    let mut done: BTreeSet<(String, u64)> = BTreeSet::new();
    let resuming = args.out.exists() && fs::metadata(&args.out).map(|m| m.len() > 0).unwrap_or(false);
    if resuming {
        let mut reader = csv::Reader::from_path(&args.out)?;
        for row in reader.deserialize() {
            let row: SweepRow = row?;
            done.insert((row.value.to_string(), row.seed));
        }
    }
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&args.out)
        .map_err(|e| Error::io(&args.out, e))?;
    let mut writer = csv::WriterBuilder::new().has_headers(!resuming).from_writer(file);

    for &value in &args.values {
        for seed in 0..args.seeds {
            if done.contains(&(value.to_string(), seed)) {
                info!(
                    "skipping {:?}={value} seed {seed}: already in {}",
                    args.param,
                    args.out.display()
                );
                continue;
            }
            let params = sweep_params(&base, args.param, value, seed)?;
            let (report, wall_ms) = sweep_point(&params, args.k, &config)?;
            info!(
                "{:?}={value} seed {seed}: Q = {:.4} ({wall_ms} ms)",
                args.param, report.q
            );
            writer.serialize(SweepRow {
                param: args.param,
                value,
                seed,
                q: report.q,
                n_truth: report.truth_count,
                n_detected: report.detected_count,
                wall_ms,
            })?;
            writer.flush().map_err(|e| Error::io(&args.out, e))?;
        }
    }
    if let Some(path) = &args.plot_script {
        fs::write(path, plot_script(&args.out, args.param)).map_err(|e| Error::io(path, e))?;
    }
    Ok(EXIT_OK)
}

fn plot_script(csv: &Path, param: SweepParam) -> String {
    let name = serde_json::to_string(&param).expect("enum serializes");
    format!(
        r#"import csv
import statistics
from collections import defaultdict

import matplotlib.pyplot as plt

by_value = defaultdict(list)
with open({csv:?}) as f:
    for row in csv.DictReader(f):
        by_value[float(row["value"])].append(float(row["q"]))
xs = sorted(by_value)
plt.plot(xs, [statistics.mean(by_value[x]) for x in xs], marker="o")
plt.xlabel({name})
plt.ylabel("Q")
plt.ylim(0, 1.05)
plt.savefig({png:?}, bbox_inches="tight")
"#,
        csv = csv.display().to_string(),
        png = csv.with_extension("png").display().to_string(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct_per_class() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::io("p", std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::Precondition("x".into())), EXIT_VALIDATION);
        assert_eq!(exit_code(&Error::parse("f", 1, "x")), EXIT_VALIDATION);
    }

    #[test]
    fn concerned_resolution() {
        let schema = AttributeSchema::uniform(AttributeKind::Numerical, 3, 0).unwrap();
        let tokens = ["a2".to_string(), "0".to_string()];
        assert_eq!(resolve_concerned(&tokens, &schema).unwrap(), vec![2, 0]);
        let err = resolve_concerned(&["bogus".to_string()], &schema).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }

    #[test]
    fn c_min_override_doubles_c_max() {
        let flags = GenFlags {
            c_min: Some(25),
            ..Default::default()
        };
        let p = flags.apply(BenchmarkParams::default());
        assert_eq!((p.c_min, p.c_max), (25, 50));
    }

    #[test]
    fn infeasible_gen_flags_fail_validation() {
        let flags = GenFlags {
            c_max: Some(5),
            d_avg: Some(30.0),
            ..Default::default()
        };
        let err = flags.apply(BenchmarkParams::default()).validate().unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
