//! Command-line interface: generation, experiments, assessment, table dumps
//! and graph summaries. Config comes from flags, optionally seeded from a
//! JSON file (`experiment --config`), with flags taking precedence.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use steingen::error::{Error, Result};
use steingen::harness::{
    cmd_assess, cmd_estimate_table, cmd_experiment, cmd_generate, cmd_stats, AssessConfig,
    ExperimentConfig, GenerateConfig, GeneratorVariant, GraphSource, StepCount,
};
use steingen::kernels::{KernelFamily, KernelSpec};
use steingen::stats::StatSelection;
use steingen::util::fmt_sig;
use steingen::ErgmSpec;

/// Default output directory: `STEINGEN_OUT_DIR` or `./steingen-out`.
fn default_out_dir() -> PathBuf {
    std::env::var_os("STEINGEN_OUT_DIR").map_or_else(|| PathBuf::from("steingen-out"), PathBuf::from)
}

#[derive(Parser)]
#[command(
    name = "steingen",
    version,
    about = "Synthetic graph samples from one observed network, with Stein-statistic evaluation"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate samples from an observed graph or an explicit model.
    Generate(GenerateArgs),
    /// Rejection-rate and fidelity/diversity sweep over trials.
    Experiment(ExperimentArgs),
    /// Score an external sample set against a graph's estimated model.
    Assess(AssessArgs),
    /// Dump the estimated conditional probability table as CSV.
    EstimateTable(EstimateTableArgs),
    /// Print summary statistics of a graph.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Edge-list input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model: a JSON spec file, or one of er|e2s|et|e2st (needs --n).
    #[arg(long)]
    model: Option<String>,
    /// Vertex count for the named model presets.
    #[arg(long)]
    n: Option<usize>,
}

impl ModelArgs {
    fn source(&self) -> Result<GraphSource> {
        match (&self.input, &self.model) {
            (Some(path), None) => Ok(GraphSource::Path(path.clone())),
            (None, Some(model)) => Ok(GraphSource::Model(parse_model(model, self.n)?)),
            _ => Err(Error::InvalidConfig("give exactly one of --input or --model".into())),
        }
    }
}

/// Named presets use beta1 = -2, beta2 = 1/n, beta3 = -1/n.
fn parse_model(name_or_path: &str, n: Option<usize>) -> Result<ErgmSpec> {
    let preset = |sel: StatSelection, betas: &dyn Fn(f64) -> Vec<f64>| -> Result<ErgmSpec> {
        let n = n.ok_or_else(|| Error::InvalidConfig("model presets need --n".into()))?;
        ErgmSpec::new(n, sel, betas(n as f64))
    };
    match name_or_path {
        "er" => preset(StatSelection::EDGES, &|_| vec![-2.0]),
        "e2s" => preset(StatSelection::EDGES_TWO_STARS, &|nf| vec![-2.0, 1.0 / nf]),
        "et" => preset(StatSelection::EDGES_TRIANGLES, &|nf| vec![-2.0, -1.0 / nf]),
        "e2st" => preset(StatSelection::ALL, &|nf| vec![-2.0, 1.0 / nf, -1.0 / nf]),
        path => {
            let text = std::fs::read_to_string(path)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

#[derive(Args)]
struct KernelArgs {
    /// Kernel family: wl | gveh | shortest_path | constant.
    #[arg(long, default_value = "wl")]
    kernel: String,
    #[arg(long, default_value_t = 3)]
    wl_levels: usize,
    #[arg(long, default_value_t = 1.0)]
    bandwidth: f64,
}

impl KernelArgs {
    fn spec(&self) -> Result<KernelSpec> {
        let family = match self.kernel.as_str() {
            "wl" | "weisfeiler_lehman" => KernelFamily::WeisfeilerLehman,
            "gveh" | "gaussian_vertex_edge_histogram" => KernelFamily::GaussianVertexEdgeHistogram,
            "sp" | "shortest_path" => KernelFamily::ShortestPath,
            "constant" | "const" => KernelFamily::Constant,
            other => return Err(Error::InvalidConfig(format!("unknown kernel {other:?}"))),
        };
        let spec = KernelSpec { family, wl_levels: self.wl_levels, bandwidth: self.bandwidth };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_steps(r: &str) -> Result<StepCount> {
    if r == "auto" {
        Ok(StepCount::Auto)
    } else {
        r.parse::<u64>()
            .map(StepCount::Fixed)
            .map_err(|e| Error::InvalidConfig(format!("bad step count {r:?}: {e}")))
    }
}

fn parse_variant(variant: &str, k: Option<u64>) -> Result<GeneratorVariant> {
    match (variant, k) {
        ("steingen", None) => Ok(GeneratorVariant::Steingen),
        ("steingen", Some(k)) | ("steingen_k", Some(k)) => Ok(GeneratorVariant::SteingenK(k)),
        ("steingen_k", None) => {
            Err(Error::InvalidConfig("variant steingen_k needs --k".into()))
        }
        ("steingen_nr", _) => Ok(GeneratorVariant::SteingenNr),
        ("exact", _) => Ok(GeneratorVariant::Exact),
        (other, _) => Err(Error::InvalidConfig(format!("unknown variant {other:?}"))),
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: ModelArgs,
    /// Statistics, comma separated: edges,two_stars,triangles.
    #[arg(long, default_value = "edges,two_stars")]
    stats: String,
    /// Generator: steingen | steingen_nr | steingen_k | exact.
    #[arg(long, default_value = "steingen")]
    variant: String,
    /// Re-estimation interval (selects the k-step variant).
    #[arg(long)]
    k: Option<u64>,
    /// Steps per sample: auto (N ln N rule) or a number.
    #[arg(long, default_value = "auto")]
    r: String,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record per-sample trajectory CSVs.
    #[arg(long)]
    trajectory: bool,
    /// Maintain the table incrementally instead of full recounts.
    #[arg(long)]
    incremental: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    source: ModelArgs,
    #[arg(long)]
    stats: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    k: Option<u64>,
    /// Step grid, comma separated (entries: auto or numbers).
    #[arg(long)]
    r_list: Option<String>,
    /// Trials w.
    #[arg(long)]
    trials: Option<usize>,
    /// Samples per trial m.
    #[arg(long)]
    m: Option<usize>,
    /// Null samples M for calibration.
    #[arg(long = "null-samples", alias = "M")]
    null_samples: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    incremental: bool,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AssessArgs {
    /// Observed graph (edge list).
    #[arg(long)]
    input: PathBuf,
    /// Directory of *.edges sample files.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value = "edges,two_stars")]
    stats: String,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long = "null-samples", alias = "M", default_value_t = 200)]
    null_samples: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateTableArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "edges,two_stars")]
    stats: String,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate(args) => {
            let cfg = GenerateConfig {
                source: args.source.source()?,
                selection: StatSelection::parse(&args.stats)?,
                variant: parse_variant(&args.variant, args.k)?,
                steps: parse_steps(&args.r)?,
                samples: args.m,
                seed: args.seed,
                record_trajectory: args.trajectory,
                incremental_updates: args.incremental,
                output_dir: args.out.unwrap_or_else(default_out_dir),
            };
            let manifest = cmd_generate(&cfg)?;
            println!(
                "wrote {} samples ({} steps each) to {}",
                manifest.sample_files.len(),
                manifest.steps,
                cfg.output_dir.display()
            );
        }
        Command::Experiment(args) => {
            let mut cfg: ExperimentConfig = match &args.config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => ExperimentConfig {
                    source: args.source.source()?,
                    selection: StatSelection::EDGES_TWO_STARS,
                    variant: GeneratorVariant::Steingen,
                    step_grid: vec![StepCount::Auto],
                    trials: 50,
                    samples_per_trial: 30,
                    kernel: KernelSpec::default(),
                    null_samples: 200,
                    alpha: 0.05,
                    seed: 0,
                    incremental_updates: false,
                    output_dir: default_out_dir(),
                },
            };
            if args.config.is_some() && (args.source.input.is_some() || args.source.model.is_some())
            {
                cfg.source = args.source.source()?;
            }
            if let Some(stats) = &args.stats {
                cfg.selection = StatSelection::parse(stats)?;
            }
            if let Some(variant) = &args.variant {
                cfg.variant = parse_variant(variant, args.k)?;
            }
            if let Some(r_list) = &args.r_list {
                cfg.step_grid =
                    r_list.split(',').map(|r| parse_steps(r.trim())).collect::<Result<_>>()?;
            }
            if let Some(w) = args.trials {
                cfg.trials = w;
            }
            if let Some(m) = args.m {
                cfg.samples_per_trial = m;
            }
            if let Some(m) = args.null_samples {
                cfg.null_samples = m;
            }
            if let Some(alpha) = args.alpha {
                cfg.alpha = alpha;
            }
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if args.incremental {
                cfg.incremental_updates = true;
            }
            if args.kernel.kernel != "wl" || args.kernel.wl_levels != 3 || args.kernel.bandwidth != 1.0 {
                cfg.kernel = args.kernel.spec()?;
            }
            if let Some(out) = args.out {
                cfg.output_dir = out;
            }
            let report = cmd_experiment(&cfg)?;
            for row in &report.rows {
                println!(
                    "r={} rejection_rate={} observed={} hamming={} one_minus_tv={}",
                    row.steps,
                    fmt_sig(row.rejection_rate, 6),
                    fmt_sig(row.observed_rejection_rate, 6),
                    fmt_sig(row.scaled_hamming_mean, 6),
                    fmt_sig(1.0 - row.tv_degree, 6)
                );
            }
            println!("reports in {}", cfg.output_dir.display());
        }
        Command::Assess(args) => {
            let cfg = AssessConfig {
                input_path: args.input,
                samples_dir: args.samples,
                selection: StatSelection::parse(&args.stats)?,
                kernel: args.kernel.spec()?,
                null_samples: args.null_samples,
                alpha: args.alpha,
                seed: args.seed,
                output_dir: args.out.unwrap_or_else(default_out_dir),
            };
            let report = cmd_assess(&cfg)?;
            println!(
                "samples={} rejection_rate={} input_p_value={} hamming={} tv={}",
                report.sample_count,
                fmt_sig(report.rejection_rate, 6),
                fmt_sig(report.input_p_value, 6),
                fmt_sig(report.metrics.scaled_hamming_mean, 6),
                fmt_sig(report.metrics.tv_degree, 6)
            );
            println!("report in {}", cfg.output_dir.display());
        }
        Command::EstimateTable(args) => {
            let csv =
                cmd_estimate_table(&args.input, StatSelection::parse(&args.stats)?, args.out.as_deref())?;
            match args.out {
                Some(path) => println!("table written to {}", path.display()),
                None => print!("{csv}"),
            }
        }
        Command::Stats(args) => {
            println!("{}", cmd_stats(&args.input)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
