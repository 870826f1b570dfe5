mod bench;
mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lrw::LrwParams;

/// Limited random walk graph clustering.
#[derive(Debug, Parser)]
#[command(name = "lrw", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark graph with ground-truth labels.
    Generate {
        #[command(subcommand)]
        model: GenerateModel,
    },
    /// Global clustering of every vertex.
    Cluster(ClusterArgs),
    /// Local cluster around one seed vertex.
    Local(LocalArgs),
    /// Evaluate a clustering.
    Eval(EvalArgs),
    /// Run the benchmark sweeps and print CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
enum GenerateModel {
    /// Planted partition G(n, p, c, q).
    Planted {
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// Expected degree.
        #[arg(long, default_value_t = 16.0)]
        d: f64,
        /// Number of clusters.
        #[arg(long, default_value_t = 4)]
        c: usize,
        /// Ratio of intra- to inter-cluster degree.
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; writes PREFIX.edges and PREFIX.labels.
        #[arg(short, long, default_value = "planted")]
        out: String,
    },
    /// Power-law degrees and cluster sizes.
    Powerlaw {
        #[arg(long, default_value_t = 2048)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        dmin: usize,
        #[arg(long, default_value_t = 128)]
        dmax: usize,
        #[arg(long, default_value_t = 16)]
        cmin: usize,
        #[arg(long, default_value_t = 256)]
        cmax: usize,
        /// Degree distribution exponent.
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        /// Cluster size distribution exponent.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "powerlaw")]
        out: String,
    },
}

/// Walk and merge parameters shared by the clustering commands.
#[derive(Debug, Clone, Args)]
struct WalkArgs {
    /// Inflation exponent, > 1.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 100)]
    tmax: usize,
    /// Prune threshold.
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    /// Convergence threshold on the L2 step.
    #[arg(long, default_value_t = 1e-9)]
    xi: f64,
    /// Significance threshold for merging.
    #[arg(long, default_value_t = 0.3)]
    tau: f64,
    /// Significance threshold for local clustering.
    #[arg(long, default_value_t = 0.3)]
    eta: f64,
    /// Seeds per exploration round; default max(1024, remaining / 100).
    #[arg(long)]
    batch_size: Option<usize>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

impl WalkArgs {
    fn params(&self) -> anyhow::Result<LrwParams> {
        let p = LrwParams {
            r: self.r,
            t_max: self.tmax,
            epsilon: self.epsilon,
            xi: self.xi,
            tau: self.tau,
            eta: self.eta,
            batch_size: self.batch_size,
        };
        if p.epsilon <= 0.0 {
            anyhow::bail!("epsilon must be in (0, 1), got {}", p.epsilon);
        }
        p.validate()?;
        Ok(p)
    }

    fn workers(&self) -> anyhow::Result<lrw::Workers> {
        Ok(match self.threads {
            Some(t) => lrw::Workers::new(t)?,
            None => lrw::Workers::available(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// `vertex <tab> cluster` per line.
    Tsv,
    /// One cluster per line, attractor first.
    Clusters,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Edge list.
    input: String,
    /// Clustering output file.
    #[arg(short, long)]
    output: String,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Seed for batch sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the cluster merging phase.
    #[arg(long)]
    skip_merge: bool,
    #[command(flatten)]
    walk: WalkArgs,
}

#[derive(Debug, Args)]
struct LocalArgs {
    /// Edge list.
    input: String,
    /// Seed vertex, as an id from the edge list.
    #[arg(long)]
    vertex: u64,
    #[command(flatten)]
    walk: WalkArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    /// Normalized mutual information against the truth.
    Nmi,
    /// Mean conductance of the predicted clusters.
    Mc,
    /// Mean over predicted clusters of the best Jaccard index against a
    /// truth community.
    Jaccard,
    /// Rand index over sampled pairs.
    Rand,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Edge list the clustering was computed on.
    #[arg(long)]
    graph: String,
    /// Predicted clustering.
    #[arg(long)]
    pred: String,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pred_format: Format,
    /// Ground truth.
    #[arg(long)]
    truth: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Clusters)]
    truth_format: Format,
    /// Metrics to report; may be repeated.
    #[arg(long, value_enum, required = true)]
    metric: Vec<Metric>,
    /// Pairs sampled per class for the Rand index.
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print one JSON object instead of key=value lines.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sweep {
    /// Global clustering on planted partition graphs.
    Planted,
    /// Local clustering on power-law graphs.
    Local,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(value_enum)]
    sweep: Sweep,
    /// Ratios to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [4.0, 3.0, 2.33, 1.86, 1.5, 1.22, 1.0])]
    q: Vec<f64>,
    /// Graphs per ratio.
    #[arg(long, default_value_t = 10)]
    graphs: usize,
    /// Seeds per graph (local sweep).
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    walk: WalkArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { model } => commands::generate(model),
        Command::Cluster(args) => commands::cluster(args),
        Command::Local(args) => commands::local(args),
        Command::Eval(args) => commands::eval(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
