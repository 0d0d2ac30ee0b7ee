use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hgricci::{clustering::cluster_weights, gen_hsbm, gen_toy, nmi, run_flow, HsbmParams, ThresholdCriterion};
use hgricci_cli::bench::{self, SweepSpec, TimingSpec};
use hgricci_cli::bundle::{ResultBundle, Timing};
use hgricci_cli::io::{self, format_hypergraph, format_labels, numeric_tokens};
use hgricci_cli::options::{
    AggArg, ClusterOptions, DistanceArg, EdgeAggArg, FlowOptions, MeasureArg, MethodArg, SolverArg, TauArg,
    WeightingArg,
};
use hgricci_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "hgricci", version, about = "Ricci-flow clustering of hypergraphs")]
struct Cli {
    /// Worker threads for curvature computations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow, pick a threshold and write the clustering.
    Cluster(ClusterArgs),
    /// Write a synthetic hypergraph and its planted labels.
    Generate {
        #[command(subcommand)]
        model: Model,
    },
    /// Print the NMI of a clustering result against a labels file.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Run a benchmark described by a JSON spec and write CSV.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Ground-truth labels, required by `--tau auto-nmi`.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Edge)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = WeightingArg::Jaccard)]
    weighting: WeightingArg,
    #[arg(long, value_enum, default_value_t = AggArg::Max)]
    agg: AggArg,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 20)]
    iters: usize,
    /// auto-h, auto-c, auto-nmi or a fixed threshold.
    #[arg(long, default_value = "auto-h")]
    tau: TauArg,
    /// exact or sinkhorn:<eps>.
    #[arg(long, default_value = "exact")]
    solver: SolverArg,
    /// Star measure for edge-Ricci.
    #[arg(long, value_enum, default_value_t = MeasureArg::Standard)]
    measure: MeasureArg,
    /// What edge-Ricci aggregates over node pairs.
    #[arg(long, value_enum, default_value_t = EdgeAggArg::Flow)]
    edge_agg: EdgeAggArg,
    /// Neighbor distance in node-Ricci measures.
    #[arg(long, value_enum, default_value_t = DistanceArg::Direct)]
    neighbor_distance: DistanceArg,
    #[arg(long)]
    out: PathBuf,
}

impl ClusterArgs {
    fn options(&self) -> ClusterOptions {
        ClusterOptions {
            method: self.method,
            tau: self.tau,
            flow: FlowOptions {
                weighting: self.weighting,
                agg: self.agg,
                alpha: self.alpha,
                p: self.p,
                iters: self.iters,
                solver: self.solver,
                measure: self.measure,
                edge_agg: self.edge_agg,
                neighbor_distance: self.neighbor_distance,
            },
        }
    }
}

#[derive(Subcommand)]
enum Model {
    /// `b` cliques of `a` nodes joined by one hyperedge over their gateways.
    Toy {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Hypergraph stochastic block model.
    Hsbm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s_in: usize,
        #[arg(long)]
        s_out: usize,
        #[arg(long)]
        n_in: usize,
        #[arg(long)]
        n_out: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Read `--n-in` as a count per community instead of a total.
        #[arg(long)]
        per_community: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    out: PathBuf,
    /// Labels file (default: the output path with extension `labels`).
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchKind {
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Timing {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn cluster(args: &ClusterArgs) -> Result<()> {
    let start = Instant::now();
    let options = args.options();
    if options.tau.0 == ThresholdCriterion::MaxNmi && args.labels.is_none() {
        return Err(CliError::Input("--tau auto-nmi requires --labels".into()));
    }
    let cfg = options.flow_config();
    cfg.validate()?;
    let parsed = io::read_hypergraph(&args.input)?;
    let truth = args.labels.as_deref().map(io::read_labels).transpose()?;
    let truth = truth.map(|l| l.align(&parsed.tokens)).transpose()?;
    let h = &parsed.hypergraph;
    log::info!("{} nodes, {} hyperedges", h.num_nodes(), h.num_edges());

    let flow_start = Instant::now();
    let flow = run_flow(h, &cfg)?;
    let flow_seconds = flow_start.elapsed().as_secs_f64();
    let report = cluster_weights(h, flow, options.tau.0, truth.as_deref())?;
    let timing = Timing { flow_seconds, total_seconds: start.elapsed().as_secs_f64() };
    let input = Some(args.input.display().to_string());
    let bundle = ResultBundle::from_report(h, options, input, parsed.tokens.clone(), &report, timing)?;
    io::write_file(&args.out, &bundle.to_json()?)?;

    println!("tau: {}", bundle.tau);
    println!("communities: {}", bundle.scores.num_communities);
    println!("hypergraph modularity: {:.6}", bundle.scores.hypergraph_modularity);
    if let Some(v) = bundle.scores.nmi {
        println!("NMI: {v:?}");
    }
    Ok(())
}

fn labels_path(out: &OutArgs) -> PathBuf {
    out.labels_out.clone().unwrap_or_else(|| out.out.with_extension("labels"))
}

fn write_model(h: &hgricci::Hypergraph, labels: &[usize], out: &OutArgs) -> Result<()> {
    let tokens = numeric_tokens(h.num_nodes());
    io::write_file(&out.out, &format_hypergraph(h, &tokens))?;
    let lp = labels_path(out);
    io::write_file(&lp, &format_labels(&tokens, labels))?;
    println!("wrote {} and {}", out.out.display(), lp.display());
    Ok(())
}

fn generate(model: &Model) -> Result<()> {
    match model {
        Model::Toy { a, b, out } => {
            let t = gen_toy(*a, *b)?;
            write_model(&t.hypergraph, &t.labels, out)
        }
        Model::Hsbm { n, k, s_in, s_out, n_in, n_out, seed, per_community, out } => {
            let params = HsbmParams {
                n: *n,
                k: *k,
                s_in: *s_in,
                s_out: *s_out,
                n_in: *n_in,
                n_out: *n_out,
                seed: *seed,
                n_in_per_community: *per_community,
            };
            let g = gen_hsbm(&params)?;
            write_model(&g.hypergraph, &g.labels, out)
        }
    }
}

fn eval(pred: &Path, labels: &Path) -> Result<()> {
    let bundle = ResultBundle::read(pred)?;
    let truth = io::read_labels(labels)?.align(&bundle.nodes)?;
    println!("{:?}", nmi(&truth, &bundle.labels)?);
    Ok(())
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn bench_sweep(spec_path: &Path, out: &Path) -> Result<()> {
    let spec: SweepSpec = read_json(spec_path)?;
    spec.validate().map_err(CliError::Input)?;
    let mut w = csv_writer(out)?;
    let mut write_err = None;
    let rows = bench::run_nmi_sweep(&spec, |row| {
        if let Err(e) = w.serialize(row).and_then(|_| Ok(w.flush()?)) {
            write_err.get_or_insert(e);
        }
    });
    if let Some(e) = write_err {
        return Err(e.into());
    }
    println!("s_in s_out N_out method mean std failed");
    for c in bench::summarize_sweep(&rows) {
        println!("{} {} {} {} {:.4} {:.4} {}", c.s_in, c.s_out, c.n_out, c.method, c.mean, c.std, c.failed);
    }
    Ok(())
}

fn bench_timing(spec_path: &Path, out: &Path) -> Result<()> {
    let spec: TimingSpec = read_json(spec_path)?;
    spec.validate().map_err(CliError::Input)?;
    let mut w = csv_writer(out)?;
    let mut write_err = None;
    let rows = bench::run_timing(&spec, |row| {
        if let Err(e) = w.serialize(row).and_then(|_| Ok(w.flush()?)) {
            write_err.get_or_insert(e);
        }
    });
    if let Some(e) = write_err {
        return Err(e.into());
    }
    let means = bench::mean_times(&rows);
    println!("K method seconds");
    for ((k, method), s) in &means {
        println!("{k} {method} {s:.4}");
    }
    for &k in &spec.ks {
        if let (Some(node), Some(edge)) = (means.get(&(k, MethodArg::Node)), means.get(&(k, MethodArg::Edge))) {
            println!("K={k} node/edge ratio {:.3}", node / edge);
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Cluster(args) => cluster(args),
        Command::Generate { model } => generate(model),
        Command::Eval { pred, labels } => eval(pred, labels),
        Command::Bench { kind: BenchKind::Sweep { spec, out } } => bench_sweep(spec, out),
        Command::Bench { kind: BenchKind::Timing { spec, out } } => bench_timing(spec, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
