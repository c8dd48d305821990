use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use signlink::active::{Budget, LogBase};
use signlink::experiment::{self, Algorithm, ExperimentConfig, ModelSpec, VerifyConfig};
use signlink::{ingest, par, Sign, SignedDigraph};

#[derive(Parser)]
#[command(name = "signlink", version, about = "Edge sign prediction in directed signed networks")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download and normalize a benchmark dataset.
    Ingest {
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "data")]
        cache: PathBuf,
    },
    /// Print dataset statistics as JSON.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch experiments: train on a random sample of edges, predict the rest.
    Batch(BatchArgs),
    /// Active experiments: query edges chosen from the topology, predict the rest.
    Active(ActiveArgs),
    /// Monte Carlo check of a mistake bound.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

impl From<OnOff> for bool {
    fn from(v: OnOff) -> bool {
        matches!(v, OnOff::On)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Args)]
struct Common {
    /// Canonical edge list (`src dst sign` per line).
    #[arg(long, required_unless_present = "config")]
    graph: Option<PathBuf>,
    /// TOML experiment config; command-line flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "+1", allow_hyphen_values = true)]
    tie_label: Sign,
    #[arg(long, value_enum, default_value = "off")]
    reciprocal: OnOff,
    /// Result file; `.csv` writes one row per repetition, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    common: Common,
    /// blc-t | blc-u | blc-tu | perceptron
    #[arg(long, default_value = "blc-tu")]
    algo: String,
    /// Comma-separated training fractions.
    #[arg(long, value_delimiter = ',', default_value = "0.15,0.3,0.45,0.6,0.75,0.9")]
    train_frac: Vec<f64>,
    #[arg(long, default_value_t = 12)]
    reps: usize,
    #[arg(long, value_enum, default_value = "off")]
    wcc: OnOff,
}

#[derive(Args)]
struct ActiveArgs {
    #[command(flatten)]
    common: Common,
    /// alcone-t | alcone-u | alcone-tu | alclog-t | alclog-u | alclog-tu
    #[arg(long, default_value = "alclog-tu")]
    strategy: String,
    #[arg(long, default_value_t = 12)]
    reps: usize,
    #[arg(long, value_enum, default_value = "on")]
    wcc: OnOff,
    #[arg(long, value_enum, default_value = "e")]
    log_base: Base,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    theorem: u8,
    #[arg(long, conflicts_with = "er", required_unless_present = "er")]
    graph: Option<PathBuf>,
    /// Erdős–Rényi test graph as `n,p`.
    #[arg(long)]
    er: Option<String>,
    /// given | consistent:F | pflip:F,P | yk:K
    #[arg(long, default_value = "given")]
    model: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Algorithm for the lower-bound check: alcone-t or alclog-t.
    #[arg(long, default_value = "alcone-t")]
    algorithm: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => experiment::write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn experiment_config(common: Common, algorithm: Algorithm, reps: usize, wcc: OnOff) -> anyhow::Result<ExperimentConfig> {
    if let Some(path) = &common.config {
        return ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()));
    }
    let mut cfg = ExperimentConfig::new(common.graph.expect("required by clap"), algorithm);
    cfg.dataset = common.dataset;
    cfg.reps = reps;
    cfg.seed = common.seed;
    cfg.tie_label = common.tie_label;
    cfg.reciprocal = common.reciprocal.into();
    cfg.wcc = Some(wcc.into());
    cfg.out = common.out;
    Ok(cfg)
}

fn run_config(cfg: ExperimentConfig) -> anyhow::Result<()> {
    let cfg = cfg.resolve()?;
    let records = experiment::run_experiment(&cfg)?;
    if cfg.out.is_none() {
        print!("{}", experiment::results_json(&records)?);
    }
    Ok(())
}

fn parse_er(s: &str) -> anyhow::Result<(usize, f64)> {
    let (n, p) = s.split_once(',').context("--er expects n,p")?;
    Ok((n.trim().parse().context("--er n")?, p.trim().parse().context("--er p")?))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    par::init_threads(cli.threads);
    match cli.cmd {
        Command::Ingest { dataset, cache } => {
            let path = ingest::ingest(&dataset, &cache)?;
            println!("{}", path.display());
        }
        Command::Stats { graph, out } => {
            let g = SignedDigraph::load(&graph).with_context(|| format!("loading {}", graph.display()))?;
            let stats = experiment::graph_stats(&g)?;
            emit(out.as_ref(), &(serde_json::to_string_pretty(&stats)? + "\n"))?;
        }
        Command::Batch(args) => {
            let algorithm: Algorithm = args.algo.parse()?;
            if !matches!(algorithm, Algorithm::Batch(_)) {
                bail!("{} is an active strategy; use the `active` command", args.algo);
            }
            let from_file = args.common.config.is_some();
            let mut cfg = experiment_config(args.common, algorithm, args.reps, args.wcc)?;
            if !from_file {
                cfg.train_fractions = args.train_frac;
            }
            run_config(cfg)?;
        }
        Command::Active(args) => {
            let algorithm: Algorithm = args.strategy.parse()?;
            if !matches!(algorithm, Algorithm::Active(_)) {
                bail!("{} is a batch classifier; use the `batch` command", args.strategy);
            }
            let from_file = args.common.config.is_some();
            let mut cfg = experiment_config(args.common, algorithm, args.reps, args.wcc)?;
            if !from_file {
                cfg.log_base = match args.log_base {
                    Base::E => LogBase::Natural,
                    Base::Two => LogBase::Two,
                };
            }
            run_config(cfg)?;
        }
        Command::Verify(args) => {
            let algorithm = match args.algorithm.as_str() {
                "alcone-t" => Budget::One,
                "alclog-t" => Budget::Log,
                other => bail!("--algorithm must be alcone-t or alclog-t, got {other}"),
            };
            let cfg = VerifyConfig {
                theorem: args.theorem,
                graph: args.graph,
                er: args.er.as_deref().map(parse_er).transpose()?,
                model: args.model.parse::<ModelSpec>()?,
                trials: args.trials,
                seed: args.seed,
                algorithm,
            };
            let rec = experiment::run_verify(&cfg)?;
            emit(args.out.as_ref(), &(serde_json::to_string_pretty(&rec)? + "\n"))?;
            if rec.report.skipped.is_none() && !rec.report.pass {
                bail!("bound violated: mean {} vs bound {}", rec.report.mean_mistakes, rec.report.bound);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
