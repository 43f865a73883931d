//! Command-line front end.
//!
//! Every command writes its artifact to `--out` (or stdout). Failures print a
//! single JSON object `{"error": <kind>, "message": ...}` on stderr and exit
//! with a nonzero status.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::clustering::{
    distance_matrix, dsc, nclm, ssdp_with, Kernel, SdpParams, SsdpConfig, NCLM_MOMENTS,
};
use crate::dataio::{
    self, load_edge_list, load_population, load_tudataset, matrix_to_csv, PopulationEntry,
    PopulationManifest, ResultDocument,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{sample_labeled_population, Builtin, Graphon, GridGraphon};
use crate::numerics::{ari, hungarian_error, ClusterAssignment};
use crate::transform::default_n0;
use crate::twosample::{
    power_matrix, two_sample_test_with, BootstrapSource, PowerMatrix, PowerSettings, TestSettings,
};

#[derive(Debug, Parser)]
#[command(
    name = "graphon-dist",
    version,
    about = "Graphon-based distances, clustering and two-sample tests for graphs"
)]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "GRAPHON_DIST_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a labeled population from named graphons into edge-list files.
    Sample(SampleArgs),
    /// Pairwise distance matrix of a population as CSV.
    Distance(DistanceArgs),
    /// Cluster a population.
    Cluster(ClusterArgs),
    /// Two-sample test between two edge-list graphs.
    Test(TestArgs),
    /// Power matrix of the two-sample test over graphon pairs.
    Power(PowerArgs),
    /// Simulated clustering benchmark and power protocol.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dsc,
    Ssdp,
    Nclm,
}

#[derive(Debug, Args)]
pub struct PopulationArgs {
    /// Comma-separated graphons to simulate from (W1..W4 or grid:<csv>).
    #[arg(long, value_delimiter = ',')]
    pub graphons: Vec<String>,
    /// Graphs per graphon.
    #[arg(long, default_value_t = 10)]
    pub per: usize,
    #[arg(long, default_value_t = 50)]
    pub nmin: usize,
    #[arg(long, default_value_t = 100)]
    pub nmax: usize,
    /// Population manifest written by `sample`.
    #[arg(long)]
    pub population: Option<PathBuf>,
    /// TUDataset directory.
    #[arg(long)]
    pub tudataset: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_nodes: usize,
    #[arg(long)]
    pub max_graphs: Option<usize>,
    /// Edge-list files.
    #[arg(long = "edge-list", num_args = 1..)]
    pub edge_lists: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub graphons: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub per: usize,
    #[arg(long, default_value_t = 50)]
    pub nmin: usize,
    #[arg(long, default_value_t = 100)]
    pub nmax: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for the edge lists and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub input: PopulationArgs,
    /// Block count; defaults to the rule for the smallest graph.
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SdpArgs {
    #[arg(long, default_value_t = SdpParams::default().tol)]
    pub sdp_tol: f64,
    #[arg(long, default_value_t = SdpParams::default().max_iter)]
    pub sdp_max_iter: usize,
    /// Neighbour rank for the adaptive bandwidths (default 5, capped at m - 1).
    #[arg(long)]
    pub neighbor_rank: Option<usize>,
    /// Exponent of the similarity kernel: `squared` or `distance`.
    #[arg(long, default_value = "squared")]
    pub kernel: Kernel,
}

impl SdpArgs {
    fn config(&self) -> SsdpConfig {
        SsdpConfig {
            neighbor_rank: self.neighbor_rank,
            kernel: self.kernel,
            sdp: SdpParams {
                tol: self.sdp_tol,
                max_iter: self.sdp_max_iter,
                ..SdpParams::default()
            },
            ..SsdpConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: PopulationArgs,
    #[arg(long, value_enum, default_value = "dsc")]
    pub algorithm: Algorithm,
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub sdp: SdpArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[arg(long, default_value_t = 100)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "first")]
    pub bootstrap_source: BootstrapSource,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    pub g1: PathBuf,
    pub g2: PathBuf,
    #[arg(long)]
    pub n0: Option<usize>,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[arg(long, value_delimiter = ',', default_value = "W1,W2,W3,W4")]
    pub graphons: Vec<String>,
    /// Size of the first graph; the second has twice as many nodes.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub n0: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the bare power matrix as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Population seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 10)]
    pub per: usize,
    #[arg(long, default_value_t = 50)]
    pub nmin: usize,
    #[arg(long, default_value_t = 100)]
    pub nmax: usize,
    #[arg(long, default_value_t = 5)]
    pub n0: usize,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "dsc,ssdp,nclm"
    )]
    pub algorithms: Vec<Algorithm>,
    #[command(flatten)]
    pub sdp: SdpArgs,
    #[arg(long, default_value_t = 100)]
    pub power_n: usize,
    #[arg(long, default_value_t = 10)]
    pub power_n0: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Skip the power protocol.
    #[arg(long)]
    pub no_power: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses a graphon spec: a builtin name or `grid:<csv path>`.
pub fn parse_graphon(spec: &str) -> Result<Graphon> {
    match spec.strip_prefix("grid:") {
        Some(path) => {
            let values = dataio::read_matrix_csv(Path::new(path))?;
            Ok(GridGraphon::new(values)?.into())
        }
        None => spec.parse(),
    }
}

fn parse_graphons(specs: &[String]) -> Result<Vec<Graphon>> {
    specs.iter().map(|s| parse_graphon(s)).collect()
}

/// A population with optional ground truth.
struct Population {
    graphs: Vec<Graph>,
    truth: Option<Vec<usize>>,
    source: serde_json::Value,
}

fn load_input(input: &PopulationArgs, seed: u64) -> Result<Population> {
    let chosen = [
        !input.graphons.is_empty(),
        input.population.is_some(),
        input.tudataset.is_some(),
        !input.edge_lists.is_empty(),
    ];
    if chosen.iter().filter(|&&c| c).count() != 1 {
        return Err(Error::Input(
            "give exactly one of --graphons, --population, --tudataset or --edge-list".into(),
        ));
    }
    if !input.graphons.is_empty() {
        let graphons = parse_graphons(&input.graphons)?;
        let (graphs, truth) =
            sample_labeled_population(&graphons, input.per, input.nmin, input.nmax, seed)?;
        return Ok(Population {
            graphs,
            truth: Some(truth),
            source: json!({
                "graphons": input.graphons,
                "per": input.per,
                "nmin": input.nmin,
                "nmax": input.nmax,
            }),
        });
    }
    if let Some(path) = &input.population {
        let (graphs, manifest) = load_population(path)?;
        return Ok(Population {
            graphs,
            truth: Some(manifest.graphs.iter().map(|e| e.label).collect()),
            source: json!({ "population": path }),
        });
    }
    if let Some(dir) = &input.tudataset {
        let (graphs, manifest) = load_tudataset(dir, input.min_nodes, input.max_graphs)?;
        return Ok(Population {
            graphs,
            truth: manifest.labels(),
            source: json!({ "tudataset": dir, "manifest": manifest }),
        });
    }
    let graphs = input
        .edge_lists
        .iter()
        .map(|p| load_edge_list(p))
        .collect::<Result<_>>()?;
    Ok(Population {
        graphs,
        truth: None,
        source: json!({ "edge_lists": input.edge_lists }),
    })
}

fn population_n0(graphs: &[Graph], n0: Option<usize>) -> usize {
    n0.unwrap_or_else(|| default_n0(graphs.iter().map(Graph::node_count).min().unwrap_or(1)))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(doc: &ResultDocument<T>, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => dataio::write_result_json(doc, path),
        None => {
            println!("{}", serde_json::to_string_pretty(doc)?);
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    pub algorithm: Algorithm,
    pub k: usize,
    pub n0: usize,
    pub labels: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ari: Option<f64>,
}

fn run_algorithm(
    algorithm: Algorithm,
    graphs: &[Graph],
    k: usize,
    n0: usize,
    seed: u64,
    sdp: &SdpArgs,
) -> Result<ClusterAssignment> {
    match algorithm {
        Algorithm::Dsc => dsc(graphs, k, n0, seed),
        Algorithm::Ssdp => ssdp_with(graphs, k, n0, seed, &sdp.config()),
        Algorithm::Nclm => nclm(graphs, k, NCLM_MOMENTS, seed),
    }
}

fn summarize(
    algorithm: Algorithm,
    n0: usize,
    labels: &ClusterAssignment,
    truth: Option<&[usize]>,
) -> Result<ClusterSummary> {
    let (error, ari_value) = match truth {
        Some(t) => (
            Some(hungarian_error(t, labels.labels())?),
            Some(ari(t, labels.labels())?),
        ),
        None => (None, None),
    };
    Ok(ClusterSummary {
        algorithm,
        k: labels.k(),
        n0,
        labels: labels.labels().to_vec(),
        cluster_sizes: labels.cluster_sizes(),
        error,
        ari: ari_value,
    })
}

fn sample(args: &SampleArgs) -> Result<()> {
    let graphons = parse_graphons(&args.graphons)?;
    let (graphs, labels) =
        sample_labeled_population(&graphons, args.per, args.nmin, args.nmax, args.seed)?;
    dataio::ensure_dir(&args.out)?;
    let width = graphs.len().to_string().len();
    let mut entries = Vec::with_capacity(graphs.len());
    for (i, (g, &label)) in graphs.iter().zip(&labels).enumerate() {
        let file = format!("graph_{i:0width$}.txt");
        dataio::write_edge_list(g, &args.out.join(&file))?;
        entries.push(PopulationEntry {
            file,
            graphon: args.graphons[label].clone(),
            label,
            nodes: g.node_count(),
        });
    }
    let manifest = PopulationManifest {
        graphons: args.graphons.clone(),
        seed: args.seed,
        graphs: entries,
    };
    let path = args.out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn distance(args: &DistanceArgs) -> Result<()> {
    let pop = load_input(&args.input, args.seed)?;
    let n0 = population_n0(&pop.graphs, args.n0);
    let d = distance_matrix(&pop.graphs, n0)?;
    emit(&matrix_to_csv(d.values()), args.out.as_deref())
}

fn cluster(args: &ClusterArgs) -> Result<()> {
    let pop = load_input(&args.input, args.seed)?;
    let n0 = population_n0(&pop.graphs, args.n0);
    let labels = run_algorithm(
        args.algorithm,
        &pop.graphs,
        args.k,
        n0,
        args.seed,
        &args.sdp,
    )?;
    let summary = summarize(args.algorithm, n0, &labels, pop.truth.as_deref())?;
    let params = json!({
        "input": pop.source,
        "algorithm": args.algorithm,
        "K": args.k,
        "n0": n0,
        "sdp_tol": args.sdp.sdp_tol,
        "sdp_max_iter": args.sdp.sdp_max_iter,
        "neighbor_rank": args.sdp.neighbor_rank,
        "kernel": args.sdp.kernel,
    });
    emit_json(
        &ResultDocument::new("cluster", args.seed, params, summary),
        args.out.as_deref(),
    )
}

fn test(args: &TestArgs) -> Result<()> {
    let g1 = load_edge_list(&args.g1)?;
    let g2 = load_edge_list(&args.g2)?;
    let n0 = args
        .n0
        .unwrap_or_else(|| default_n0(g1.node_count().min(g2.node_count())));
    let settings = TestSettings {
        n0,
        bootstrap: args.bootstrap.bootstrap,
        alpha: args.bootstrap.alpha,
        seed: args.seed,
        source: args.bootstrap.bootstrap_source,
    };
    let outcome = two_sample_test_with(&g1, &g2, &settings)?;
    let params = json!({
        "g1": args.g1,
        "g2": args.g2,
        "n0": n0,
        "bootstrap": settings.bootstrap,
        "alpha": settings.alpha,
        "bootstrap_source": settings.source,
    });
    emit_json(
        &ResultDocument::new("test", args.seed, params, outcome),
        args.out.as_deref(),
    )
}

fn power_settings(
    n: usize,
    n0: usize,
    trials: usize,
    b: &BootstrapArgs,
    seed: u64,
) -> PowerSettings {
    PowerSettings {
        n,
        n0,
        trials,
        bootstrap: b.bootstrap,
        alpha: b.alpha,
        seed,
        source: b.bootstrap_source,
    }
}

fn power(args: &PowerArgs) -> Result<()> {
    let graphons = parse_graphons(&args.graphons)?;
    let settings = power_settings(args.n, args.n0, args.trials, &args.bootstrap, args.seed);
    let start = Instant::now();
    let matrix = power_matrix(&graphons, &settings)?;
    if let Some(path) = &args.csv {
        dataio::write_matrix_csv(&matrix.power, path)?;
    }
    let params = json!({ "graphons": args.graphons, "settings": settings });
    let mut doc = ResultDocument::new("power", args.seed, params, matrix);
    doc.metadata.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    emit_json(&doc, args.out.as_deref())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkCase {
    pub graphons: Vec<String>,
    pub algorithm: Algorithm,
    pub errors: Vec<f64>,
    pub aris: Vec<f64>,
    pub mean_error: f64,
    pub mean_ari: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkSummary {
    pub clustering: Vec<BenchmarkCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerMatrix>,
}

/// All subsets of size 3 and 4 of the builtin graphons, in lexicographic order.
pub fn benchmark_combinations() -> Vec<Vec<Builtin>> {
    let all = Builtin::ALL;
    let mut out = Vec::new();
    for skip in (0..all.len()).rev() {
        out.push(
            all.iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &b)| b)
                .collect(),
        );
    }
    out.push(all.to_vec());
    out
}

fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    let start = Instant::now();
    let mut cases = Vec::new();
    for combo in benchmark_combinations() {
        let graphons: Vec<Graphon> = combo.iter().map(|&b| b.into()).collect();
        let k = graphons.len();
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new(); args.algorithms.len()];
        for s in 0..args.seeds {
            let seed = args.seed + s;
            let (graphs, truth) =
                sample_labeled_population(&graphons, args.per, args.nmin, args.nmax, seed)?;
            for (a, &algorithm) in args.algorithms.iter().enumerate() {
                let labels = run_algorithm(algorithm, &graphs, k, args.n0, seed, &args.sdp)?;
                runs[a].push((
                    hungarian_error(&truth, labels.labels())?,
                    ari(&truth, labels.labels())?,
                ));
            }
        }
        for (a, &algorithm) in args.algorithms.iter().enumerate() {
            let errors: Vec<f64> = runs[a].iter().map(|r| r.0).collect();
            let aris: Vec<f64> = runs[a].iter().map(|r| r.1).collect();
            let count = errors.len().max(1) as f64;
            cases.push(BenchmarkCase {
                graphons: combo.iter().map(ToString::to_string).collect(),
                algorithm,
                mean_error: errors.iter().sum::<f64>() / count,
                mean_ari: aris.iter().sum::<f64>() / count,
                errors,
                aris,
            });
        }
        log::info!("benchmark {:?} done after {:.1?}", combo, start.elapsed());
    }
    let power = if args.no_power {
        None
    } else {
        let graphons: Vec<Graphon> = Builtin::ALL.iter().map(|&b| b.into()).collect();
        let settings = power_settings(
            args.power_n,
            args.power_n0,
            args.trials,
            &args.bootstrap,
            args.seed,
        );
        Some(power_matrix(&graphons, &settings)?)
    };
    let params = json!({
        "seeds": args.seeds,
        "per": args.per,
        "nmin": args.nmin,
        "nmax": args.nmax,
        "n0": args.n0,
        "algorithms": args.algorithms,
        "sdp_tol": args.sdp.sdp_tol,
        "sdp_max_iter": args.sdp.sdp_max_iter,
        "neighbor_rank": args.sdp.neighbor_rank,
        "kernel": args.sdp.kernel,
        "power_n": args.power_n,
        "power_n0": args.power_n0,
        "trials": args.trials,
        "bootstrap": args.bootstrap.bootstrap,
        "alpha": args.bootstrap.alpha,
        "bootstrap_source": args.bootstrap.bootstrap_source,
    });
    let mut doc = ResultDocument::new(
        "benchmark",
        args.seed,
        params,
        BenchmarkSummary {
            clustering: cases,
            power,
        },
    );
    doc.metadata.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    emit_json(&doc, args.out.as_deref())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Input("--threads must be at least 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match &cli.command {
        Command::Sample(a) => sample(a),
        Command::Distance(a) => distance(a),
        Command::Cluster(a) => cluster(a),
        Command::Test(a) => test(a),
        Command::Power(a) => power(a),
        Command::Benchmark(a) => benchmark(a),
    }
}

/// One-line JSON error report.
pub fn error_line(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!("{}", error_line("usage", first));
            return 2;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            1
        }
    }
}
