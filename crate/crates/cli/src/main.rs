use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bicriteria::harness::{
    gen_mixture, load_dataset, run_experiment, write_points_csv, Dataset, DatasetFormat,
    ExperimentConfig, MixtureSpec, RunOptions,
};
use bicriteria::{
    audit_run, brute_force_kmeans, brute_force_medoids, kappa_lb,
    AuditParams, Error, GreedyTrace, Norm, PointSpace, ReferenceSolution,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "bicriteria", version, about = "Greedy bi-criteria clustering experiments")]
struct Cli {
    /// Base seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write one JSONL trace per greedy run.
    #[arg(long, global = true)]
    emit_traces: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an experiment config.
    Run { config: PathBuf },
    /// Generate a Gaussian mixture with its planted reference.
    Gen(GenArgs),
    /// Exhaustive optimum on a tiny data set.
    Oracle {
        dataset: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Certify the conditions and the recurrence along a greedy trace.
    Audit {
        trace: PathBuf,
        reference: PathBuf,
        /// Data set the trace was produced on.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        /// Defaults to `(1 + κ̂_lb)^q`.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Validate a distance-matrix CSV.
    CheckMetric { csv: PathBuf },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n_per_cluster: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 10.0)]
    center_box: f64,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    #[command(flatten)]
    space: SpaceArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SpaceKindArg {
    Kmeans,
    Euclidean,
    Metric,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

#[derive(Args, Debug)]
struct SpaceArgs {
    #[arg(long, value_enum, default_value_t = SpaceKindArg::Kmeans)]
    space: SpaceKindArg,
    /// Cost exponent for euclidean and metric spaces.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    norm: NormArg,
    /// Load a metric CSV even when it violates the metric axioms.
    #[arg(long)]
    allow_invalid_metric: bool,
}

impl SpaceArgs {
    fn norm(&self) -> Norm {
        match self.norm {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
            NormArg::Linf => Norm::Linf,
        }
    }

    fn for_dim(&self, dim: usize) -> bicriteria::Result<PointSpace> {
        match self.space {
            SpaceKindArg::Kmeans => PointSpace::kmeans(dim),
            SpaceKindArg::Euclidean => PointSpace::euclidean(dim, self.norm(), self.p),
            SpaceKindArg::Metric => Err(Error::InvalidConfig(
                "metric spaces come from a metric CSV".into(),
            )),
        }
    }

    fn load(&self, path: &Path) -> bicriteria::Result<(PointSpace, Vec<bicriteria::Point>)> {
        let format = match self.space {
            SpaceKindArg::Metric => DatasetFormat::MetricCsv,
            _ => DatasetFormat::PointsCsv,
        };
        let data = load_dataset(path, format, self.allow_invalid_metric)?;
        let points = data.points();
        let space = match data {
            Dataset::Points { dim, .. } => self.for_dim(dim)?,
            Dataset::Metric { matrix, .. } => PointSpace::finite_metric(matrix, self.p)?,
        };
        Ok((space, points))
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Run(e.to_string())
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
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `bicriteria --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { config } => cmd_run(cli, config),
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Oracle { dataset, k, space } => cmd_oracle(dataset, *k, space),
        Command::Audit {
            trace,
            reference,
            data,
            space,
            gamma,
            tau,
            epsilon,
            alpha,
        } => cmd_audit(trace, reference, data, space, *gamma, *tau, *epsilon, *alpha),
        Command::CheckMetric { csv } => cmd_check_metric(csv),
    }
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<(), Failure> {
    if !path.is_file() {
        return Err(Failure::Usage(format!(
            "config file {} not found",
            path.display()
        )));
    }
    let config = ExperimentConfig::from_path(path).map_err(|e| match e {
        Error::Io(_) => Failure::Run(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    let options = RunOptions {
        threads: cli.threads,
        emit_traces: cli.emit_traces,
        output: cli.output.clone(),
        seed: cli.seed,
    };
    let result = run_experiment(&config, &options)?;
    let out = options.output.unwrap_or(config.output);
    for a in &result.algorithms {
        println!(
            "{:<16} median {:>14} min {:>14} failures {}",
            a.name,
            fmt_opt(a.median_cost),
            fmt_opt(a.min_cost),
            a.failures
        );
    }
    println!("wrote {}", out.join("result.json").display());
    match result.failures() {
        0 => Ok(()),
        n => Err(Failure::Run(format!("{n} run(s) failed"))),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<(), Failure> {
    let spec = MixtureSpec {
        k: args.k,
        n_per_cluster: args.n_per_cluster,
        dim: args.dim,
        center_box: args.center_box,
        spread: args.spread,
        seed: cli.seed.unwrap_or(0),
    };
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let space = args
        .space
        .for_dim(args.dim)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mix = gen_mixture(&spec, &space)?;
    let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    write_points_csv(&dir.join("points.csv"), &mix.points)?;
    fs::write(
        dir.join("reference.json"),
        serde_json::to_string_pretty(&mix.reference)? + "\n",
    )?;
    fs::write(
        dir.join("mixture.json"),
        serde_json::to_string_pretty(&json!({
            "spec": spec,
            "labels": mix.labels,
            "planted": mix.planted,
        }))? + "\n",
    )?;
    println!(
        "wrote {} points to {} (reference cost {})",
        mix.points.len(),
        dir.join("points.csv").display(),
        mix.reference.cost
    );
    Ok(())
}

fn cmd_oracle(path: &Path, k: usize, space_args: &SpaceArgs) -> Result<(), Failure> {
    let (space, points) = space_args.load(path)?;
    let medoids = brute_force_medoids(&space, &points, k)?;
    let mut out = json!({
        "k": k,
        "n": points.len(),
        "medoids": { "indices": medoids.indices, "cost": medoids.cost },
    });
    if space.is_kmeans() && points.len() <= bicriteria::oracle::KMEANS_MAX_POINTS {
        let km = brute_force_kmeans(&space, &points, k)?;
        out["kmeans"] = json!({
            "partition": km.partition.parts,
            "means": km.means,
            "cost": km.cost,
        });
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    trace_path: &Path,
    reference_path: &Path,
    data: &Path,
    space_args: &SpaceArgs,
    gamma: Option<f64>,
    tau: f64,
    epsilon: f64,
    alpha: Option<f64>,
) -> Result<(), Failure> {
    let (space, points) = space_args.load(data)?;
    let trace = GreedyTrace::read_jsonl(BufReader::new(fs::File::open(trace_path)?))?;
    let reference: ReferenceSolution =
        serde_json::from_reader(BufReader::new(fs::File::open(reference_path)?))?;
    reference.verify(&space, &points)?;
    let gamma = match gamma {
        Some(g) => g,
        None => (1.0 + kappa_lb(&space, &points, &reference)?).powf(space.q()),
    };
    let report = audit_run(
        &space,
        &points,
        &reference,
        &trace,
        AuditParams {
            gamma,
            tau,
            epsilon,
            alpha,
        },
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "{} implication and {} recurrence violation(s)",
            report.implication_violations, report.recurrence_violations
        )))
    }
}

fn cmd_check_metric(path: &Path) -> Result<(), Failure> {
    let data = load_dataset(path, DatasetFormat::MetricCsv, true)?;
    let Dataset::Metric { report, .. } = data else {
        unreachable!("metric format yields a metric");
    };
    if report.is_valid() {
        println!("valid");
        Ok(())
    } else {
        println!("{report}");
        Err(Failure::Run(format!(
            "{} violation(s)",
            report.violations.len()
        )))
    }
}
