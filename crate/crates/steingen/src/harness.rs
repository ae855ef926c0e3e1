//! Command implementations behind the CLI: sample generation, the synthetic
//! rejection-rate / frontier experiment, assessment of externally generated
//! samples, table dumps and graph summaries.
//!
//! Every command writes its outputs from (config, seed) alone, so reruns
//! produce byte-identical files; manifests carry the derived seeds and a
//! config fingerprint.

use crate::ergm::{default_steps, sample_exact, ErgmSpec};
use crate::error::{Error, Result};
use crate::estimator::{estimate_table, ConditionalTable};
use crate::graph::Graph;
use crate::io::{read_edge_list_path, write_edge_list_path, VertexCountMode};
use crate::kernels::KernelSpec;
use crate::metrics::{batch_fidelity_diversity, reference_values, simulate_null_tv, MetricsRecord, SummaryStats};
use crate::sampler::{
    generate_with_model, steingen_generate, GenRunConfig, ReestimateSchedule, Trajectory,
};
use crate::stats::StatSelection;
use crate::stein::{agrasst_squared, calibrate, gkss_squared, rejection_rate, Calibration, Resample};
use crate::util::{derive_seed, fmt_sig, fnv1a};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Where the graphs under study come from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum GraphSource {
    /// Load an observed graph from an edge-list file.
    #[serde(rename = "input_path")]
    Path(PathBuf),
    /// Draw observed graphs from an explicit model with the ground-truth
    /// sampler (empty initial graph, default-steps burn-in).
    #[serde(rename = "model")]
    Model(ErgmSpec),
}

/// Which chain produces samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorVariant {
    /// Re-estimate the conditional table after every accepted change.
    Steingen,
    /// Estimate once from the input, never re-estimate.
    SteingenNr,
    /// Re-estimate after every k accepted changes.
    SteingenK(u64),
    /// Ground-truth Glauber sampler of the explicit model.
    Exact,
}

impl GeneratorVariant {
    pub fn schedule(&self) -> Option<ReestimateSchedule> {
        match self {
            GeneratorVariant::Steingen => Some(ReestimateSchedule::Every(1)),
            GeneratorVariant::SteingenNr => Some(ReestimateSchedule::Never),
            GeneratorVariant::SteingenK(k) => Some(ReestimateSchedule::Every(*k)),
            GeneratorVariant::Exact => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GeneratorVariant::Steingen => "steingen".into(),
            GeneratorVariant::SteingenNr => "steingen_nr".into(),
            GeneratorVariant::SteingenK(k) => format!("steingen_k{k}"),
            GeneratorVariant::Exact => "exact".into(),
        }
    }
}

/// Step-count request: the N log N rule or an explicit value.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepCount {
    Auto,
    Fixed(u64),
}

impl StepCount {
    pub fn resolve(&self, n: usize) -> Result<u64> {
        match self {
            StepCount::Auto => default_steps(n),
            StepCount::Fixed(r) => Ok(*r),
        }
    }
}

fn write_text<P: AsRef<Path>>(path: P, text: &str) -> Result<()> {
    if let Some(parent) = path.as_ref().parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn config_hash<T: Serialize>(cfg: &T) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

fn load_source(source: &GraphSource, mode: VertexCountMode, seed: u64) -> Result<Graph> {
    match source {
        GraphSource::Path(p) => read_edge_list_path(p, mode),
        GraphSource::Model(spec) => {
            sample_exact(spec, default_steps(spec.n())?, seed, None)
        }
    }
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub source: GraphSource,
    pub selection: StatSelection,
    pub variant: GeneratorVariant,
    pub steps: StepCount,
    /// Number of samples m.
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub record_trajectory: bool,
    #[serde(default)]
    pub incremental_updates: bool,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerateManifest {
    pub command: String,
    pub config_hash: String,
    pub vertex_count: usize,
    pub steps: u64,
    pub input_file: String,
    pub sample_files: Vec<String>,
    pub sample_seeds: Vec<u64>,
    pub change_counts: Vec<u64>,
    pub reestimate_counts: Vec<u64>,
    pub config: GenerateConfig,
}

/// Generates `m` samples, writing one edge-list file per sample, optional
/// per-sample trajectory CSVs, and a manifest with all derived seeds.
pub fn cmd_generate(cfg: &GenerateConfig) -> Result<GenerateManifest> {
    if cfg.samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample (m >= 1)".into()));
    }
    let model = match (&cfg.source, cfg.variant) {
        (GraphSource::Path(_), GeneratorVariant::Exact) => {
            return Err(Error::InvalidConfig(
                "the exact generator needs an explicit model, not an input file".into(),
            ));
        }
        (GraphSource::Model(spec), _) => Some(spec.clone()),
        _ => None,
    };
    let x0 = load_source(&cfg.source, VertexCountMode::HeaderOrInfer, derive_seed(cfg.seed, u64::MAX))?;
    let n = x0.n();
    let steps = cfg.steps.resolve(n)?;
    fs::create_dir_all(&cfg.output_dir)?;

    let input_file = cfg.output_dir.join("input.edges");
    write_edge_list_path(&x0, &input_file)?;

    let seeds: Vec<u64> = (0..cfg.samples as u64).map(|i| derive_seed(cfg.seed, i)).collect();
    let runs: Vec<(Graph, Trajectory)> = seeds
        .par_iter()
        .map(|&sample_seed| -> Result<(Graph, Trajectory)> {
            match cfg.variant {
                GeneratorVariant::Exact => {
                    let spec = model.as_ref().expect("validated above");
                    let g = sample_exact(spec, steps, sample_seed, None)?;
                    Ok((g, Trajectory::default()))
                }
                _ => {
                    let run = GenRunConfig {
                        steps,
                        reestimate: cfg.variant.schedule().expect("non-exact variant"),
                        seed: sample_seed,
                        record_trajectory: cfg.record_trajectory,
                        record_every: 0,
                        incremental_updates: cfg.incremental_updates,
                    };
                    steingen_generate(&x0, cfg.selection, &run)
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut sample_files = Vec::with_capacity(runs.len());
    for (i, (g, traj)) in runs.iter().enumerate() {
        let name = format!("sample_{i:04}.edges");
        write_edge_list_path(g, cfg.output_dir.join(&name))?;
        if cfg.record_trajectory {
            write_text(cfg.output_dir.join(format!("trajectory_{i:04}.csv")), &traj.to_csv())?;
        }
        sample_files.push(name);
    }

    let manifest = GenerateManifest {
        command: "generate".into(),
        config_hash: config_hash(cfg),
        vertex_count: n,
        steps,
        input_file: "input.edges".into(),
        sample_files,
        sample_seeds: seeds,
        change_counts: runs.iter().map(|(_, t)| t.change_count).collect(),
        reestimate_counts: runs.iter().map(|(_, t)| t.reestimate_count).collect(),
        config: cfg.clone(),
    };
    write_text(
        cfg.output_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub selection: StatSelection,
    pub variant: GeneratorVariant,
    /// Step counts to sweep; a single entry runs the plain experiment.
    pub step_grid: Vec<StepCount>,
    /// Trials w (fresh input graph per trial when the source is a model).
    pub trials: usize,
    /// Samples m per trial.
    pub samples_per_trial: usize,
    pub kernel: KernelSpec,
    /// Null samples M for the Monte-Carlo threshold.
    pub null_samples: usize,
    pub alpha: f64,
    pub seed: u64,
    #[serde(default)]
    pub incremental_updates: bool,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRow {
    pub steps: u64,
    pub rejection_rate: f64,
    pub observed_rejection_rate: f64,
    pub scaled_hamming_mean: f64,
    pub scaled_hamming_sd: f64,
    pub tv_degree: f64,
    pub null_tv: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub config_hash: String,
    pub generator: String,
    pub rows: Vec<ExperimentRow>,
    /// Hamming limit 2a*(1−a*) and TV guideline (nπ)^{-1/2} (model runs).
    pub reference: Option<(f64, f64)>,
    pub config: ExperimentConfig,
}

/// The statistic and null sampler of one experiment: gKSS against the
/// explicit model when one is given, AgraSSt against the table estimated
/// from the loaded input otherwise.
enum TestSetup {
    Model(ErgmSpec),
    Table { x0: Graph, table: ConditionalTable, chain_steps: u64 },
}

impl TestSetup {
    fn statistic(&self, kernel: &KernelSpec, g: &Graph) -> Result<f64> {
        match self {
            TestSetup::Model(spec) => gkss_squared(spec, g, kernel),
            TestSetup::Table { table, .. } => {
                agrasst_squared(table, g, kernel, Resample::Auto { seed: 0 })
            }
        }
    }

    fn null_sample(&self, seed: u64) -> Result<Graph> {
        match self {
            TestSetup::Model(spec) => sample_exact(spec, default_steps(spec.n())?, seed, None),
            TestSetup::Table { x0, table, chain_steps } => {
                let cfg = GenRunConfig::new(*chain_steps, ReestimateSchedule::Never, seed);
                generate_with_model(x0, table, &cfg).map(|(g, _)| g)
            }
        }
    }
}

/// Runs the full synthetic protocol: per trial, draw (or load) an input
/// graph, generate a batch, test every sample against the Monte-Carlo
/// threshold, and score fidelity/diversity; aggregates per step count.
///
/// Writes `trials_r<r>.csv` incrementally (one row per finished trial),
/// `summary.csv`, `frontier.csv` and `manifest.json`.
pub fn cmd_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.trials == 0 || cfg.samples_per_trial == 0 {
        return Err(Error::InvalidConfig("trials and samples per trial must be >= 1".into()));
    }
    if cfg.step_grid.is_empty() {
        return Err(Error::InvalidConfig("step grid must not be empty".into()));
    }
    if matches!((&cfg.source, cfg.variant), (GraphSource::Path(_), GeneratorVariant::Exact)) {
        return Err(Error::InvalidConfig(
            "the exact generator needs an explicit model, not an input file".into(),
        ));
    }
    fs::create_dir_all(&cfg.output_dir)?;

    let (setup, reference, n) = match &cfg.source {
        GraphSource::Model(spec) => {
            (TestSetup::Model(spec.clone()), Some(reference_values(spec)?), spec.n())
        }
        GraphSource::Path(p) => {
            let x0 = read_edge_list_path(p, VertexCountMode::HeaderOrInfer)?;
            let table = estimate_table(&[&x0], cfg.selection)?;
            let n = x0.n();
            let chain_steps = default_steps(n)?;
            (TestSetup::Table { x0, table, chain_steps }, None, n)
        }
    };

    // One calibration for the whole experiment; the null distribution does
    // not depend on the generator or the step count.
    let kernel = cfg.kernel;
    let null_values: Vec<f64> = (0..cfg.null_samples as u64)
        .into_par_iter()
        .map(|i| {
            let g = setup.null_sample(derive_seed(cfg.seed.wrapping_add(0xCA11), i))?;
            setup.statistic(&kernel, &g)
        })
        .collect::<Result<_>>()?;
    let calibration = calibrate(null_values, cfg.alpha, cfg.seed)?;

    // Null degree-TV level for the frontier plot.
    let null_tv = match &cfg.source {
        GraphSource::Model(spec) => {
            simulate_null_tv(spec, default_steps(n)?, 50, derive_seed(cfg.seed, 0x7711))?
        }
        GraphSource::Path(_) => 0.0,
    };

    let mut rows = Vec::new();
    for (grid_idx, step_req) in cfg.step_grid.iter().enumerate() {
        let steps = step_req.resolve(n)?;
        let trials_path = cfg.output_dir.join(format!("trials_r{steps}.csv"));
        let mut trials_csv = String::from(
            "trial,rejection_rate,observed_reject,scaled_hamming_mean,scaled_hamming_sd,tv_degree\n",
        );
        write_text(&trials_path, &trials_csv)?;

        let mut rates = Vec::new();
        let mut observed_rejects = 0usize;
        let mut ham_means = Vec::new();
        let mut ham_sds = Vec::new();
        let mut tvs = Vec::new();

        for trial in 0..cfg.trials as u64 {
            let trial_seed = derive_seed(cfg.seed, (grid_idx as u64) << 32 | trial);
            let x0 = match &setup {
                TestSetup::Model(spec) => {
                    sample_exact(spec, default_steps(n)?, derive_seed(trial_seed, 0), None)?
                }
                TestSetup::Table { x0, .. } => x0.clone(),
            };

            let samples: Vec<Graph> = (0..cfg.samples_per_trial as u64)
                .into_par_iter()
                .map(|i| -> Result<Graph> {
                    let sample_seed = derive_seed(trial_seed, 1 + i);
                    match cfg.variant {
                        GeneratorVariant::Exact => {
                            let TestSetup::Model(spec) = &setup else { unreachable!() };
                            sample_exact(spec, steps, sample_seed, None)
                        }
                        _ => {
                            let run = GenRunConfig {
                                steps,
                                reestimate: cfg.variant.schedule().expect("non-exact"),
                                seed: sample_seed,
                                record_trajectory: false,
                                record_every: 0,
                                incremental_updates: cfg.incremental_updates,
                            };
                            steingen_generate(&x0, cfg.selection, &run).map(|(g, _)| g)
                        }
                    }
                })
                .collect::<Result<_>>()?;

            let reports: Vec<_> = samples
                .par_iter()
                .map(|g| setup.statistic(&kernel, g).map(|v| calibration.report(v)))
                .collect::<Result<_>>()?;
            let rate = rejection_rate(&reports);
            let observed_reject = calibration.report(setup.statistic(&kernel, &x0)?).reject;
            let metrics = batch_fidelity_diversity(&x0, &samples)?;

            rates.push(rate);
            observed_rejects += usize::from(observed_reject);
            ham_means.push(metrics.scaled_hamming_mean);
            ham_sds.push(metrics.scaled_hamming_sd);
            tvs.push(metrics.tv_degree);

            let _ = writeln!(
                trials_csv,
                "{trial},{},{},{},{},{}",
                fmt_sig(rate, 6),
                u8::from(observed_reject),
                fmt_sig(metrics.scaled_hamming_mean, 6),
                fmt_sig(metrics.scaled_hamming_sd, 6),
                fmt_sig(metrics.tv_degree, 6)
            );
            write_text(&trials_path, &trials_csv)?;
        }

        let w = cfg.trials as f64;
        rows.push(ExperimentRow {
            steps,
            rejection_rate: rates.iter().sum::<f64>() / w,
            observed_rejection_rate: observed_rejects as f64 / w,
            scaled_hamming_mean: ham_means.iter().sum::<f64>() / w,
            scaled_hamming_sd: ham_sds.iter().sum::<f64>() / w,
            tv_degree: tvs.iter().sum::<f64>() / w,
            null_tv,
        });
    }

    let mut summary = String::from(
        "r,rejection_rate,observed_rejection_rate,scaled_hamming_mean,scaled_hamming_sd,tv_degree,one_minus_tv,null_tv\n",
    );
    for row in &rows {
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{}",
            row.steps,
            fmt_sig(row.rejection_rate, 6),
            fmt_sig(row.observed_rejection_rate, 6),
            fmt_sig(row.scaled_hamming_mean, 6),
            fmt_sig(row.scaled_hamming_sd, 6),
            fmt_sig(row.tv_degree, 6),
            fmt_sig(1.0 - row.tv_degree, 6),
            fmt_sig(row.null_tv, 6)
        );
    }
    write_text(cfg.output_dir.join("summary.csv"), &summary)?;

    let mut frontier = String::from("r,one_minus_tv,hamming_mean,hamming_sd\n");
    for row in &rows {
        let _ = writeln!(
            frontier,
            "{},{},{},{}",
            row.steps,
            fmt_sig(1.0 - row.tv_degree, 6),
            fmt_sig(row.scaled_hamming_mean, 6),
            fmt_sig(row.scaled_hamming_sd, 6)
        );
    }
    write_text(cfg.output_dir.join("frontier.csv"), &frontier)?;

    let report = ExperimentReport {
        command: "experiment".into(),
        config_hash: config_hash(cfg),
        generator: cfg.variant.name(),
        rows,
        reference,
        config: cfg.clone(),
    };
    write_text(
        cfg.output_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// assess
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssessConfig {
    pub input_path: PathBuf,
    pub samples_dir: PathBuf,
    pub selection: StatSelection,
    pub kernel: KernelSpec,
    pub null_samples: usize,
    pub alpha: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssessReport {
    pub command: String,
    pub config_hash: String,
    pub sample_count: usize,
    pub rejection_rate: f64,
    /// Monte-Carlo p-value of the input graph under its own estimated model.
    pub input_p_value: f64,
    pub input_statistic: f64,
    pub threshold: f64,
    pub null_min: f64,
    pub null_median: f64,
    pub null_max: f64,
    pub degenerate_null: bool,
    pub metrics: MetricsRecord,
    pub input_summary: SummaryStats,
    pub config: AssessConfig,
}

/// Estimates a conditional table from the input graph and scores an external
/// sample set: AgraSSt rejection rate, the input's own p-value, and
/// fidelity/diversity metrics.
pub fn cmd_assess(cfg: &AssessConfig) -> Result<AssessReport> {
    let x0 = read_edge_list_path(&cfg.input_path, VertexCountMode::HeaderOrInfer)?;
    let table = estimate_table(&[&x0], cfg.selection)?;
    let samples = read_sample_dir(&cfg.samples_dir, x0.n())?;
    if samples.is_empty() {
        return Err(Error::EmptyInput("no .edges samples found in the samples directory"));
    }

    let kernel = cfg.kernel;
    let statistic = |g: &Graph| agrasst_squared(&table, g, &kernel, Resample::Auto { seed: cfg.seed });
    let chain_steps = default_steps(x0.n())?;
    let null_values: Vec<f64> = (0..cfg.null_samples as u64)
        .into_par_iter()
        .map(|i| {
            let run = GenRunConfig::new(
                chain_steps,
                ReestimateSchedule::Never,
                derive_seed(cfg.seed.wrapping_add(0xA55E55), i),
            );
            let (g, _) = generate_with_model(&x0, &table, &run)?;
            statistic(&g)
        })
        .collect::<Result<_>>()?;
    let calibration: Calibration = calibrate(null_values, cfg.alpha, cfg.seed)?;

    let reports: Vec<_> = samples
        .par_iter()
        .map(|g| statistic(g).map(|v| calibration.report(v)))
        .collect::<Result<_>>()?;
    let input_stat = statistic(&x0)?;
    let (null_min, null_median, null_max) = calibration.null_summary();

    let mut metrics = batch_fidelity_diversity(&x0, &samples)?;
    metrics.reference = None;

    let report = AssessReport {
        command: "assess".into(),
        config_hash: config_hash(cfg),
        sample_count: samples.len(),
        rejection_rate: rejection_rate(&reports),
        input_p_value: calibration.p_value(input_stat),
        input_statistic: input_stat,
        threshold: calibration.threshold,
        null_min,
        null_median,
        null_max,
        degenerate_null: calibration.degenerate_null,
        metrics,
        input_summary: crate::metrics::summary_statistics(&x0),
        config: cfg.clone(),
    };
    fs::create_dir_all(&cfg.output_dir)?;
    write_text(
        cfg.output_dir.join("assess_report.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;
    let csv = format!(
        "{}\n{}\n",
        format_args!("rejection_rate,input_p_value,{}", MetricsRecord::CSV_HEADER),
        format_args!(
            "{},{},{}",
            fmt_sig(report.rejection_rate, 6),
            fmt_sig(report.input_p_value, 6),
            report.metrics.to_csv_row()
        )
    );
    write_text(cfg.output_dir.join("assess_metrics.csv"), &csv)?;
    Ok(report)
}

/// Reads every `*.edges` file in a directory, sorted by file name.
fn read_sample_dir(dir: &Path, expected_n: usize) -> Result<Vec<Graph>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "edges"))
        .filter(|p| p.file_name().is_some_and(|f| f != "input.edges"))
        .collect();
    paths.sort();
    let mut graphs = Vec::with_capacity(paths.len());
    for p in paths {
        let g = read_edge_list_path(&p, VertexCountMode::HeaderOrInfer)?;
        if g.n() != expected_n {
            return Err(Error::DimensionMismatch { left: expected_n, right: g.n() });
        }
        graphs.push(g);
    }
    Ok(graphs)
}

// ---------------------------------------------------------------------------
// estimate-table and stats
// ---------------------------------------------------------------------------

/// Estimates the conditional table from an edge-list file and returns its
/// CSV dump (written to `output` when given).
pub fn cmd_estimate_table(
    input: &Path,
    selection: StatSelection,
    output: Option<&Path>,
) -> Result<String> {
    let g = read_edge_list_path(input, VertexCountMode::HeaderOrInfer)?;
    let table = estimate_table(&[&g], selection)?;
    let csv = table.to_csv();
    if let Some(path) = output {
        write_text(path, &csv)?;
    }
    Ok(csv)
}

/// Summary statistics of one graph as pretty JSON.
pub fn cmd_stats(input: &Path) -> Result<String> {
    let g = read_edge_list_path(input, VertexCountMode::HeaderOrInfer)?;
    let summary = crate::metrics::summary_statistics(&g);
    #[derive(Serialize)]
    struct StatsOut {
        n: usize,
        edges: usize,
        summary: SummaryStats,
    }
    Ok(serde_json::to_string_pretty(&StatsOut {
        n: g.n(),
        edges: g.edge_count(),
        summary,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn er_model(n: usize) -> ErgmSpec {
        ErgmSpec::erdos_renyi(n, -2.0).unwrap()
    }

    fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
        let mut entries: Vec<_> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        entries
            .into_iter()
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect()
    }

    #[test]
    fn generate_is_reproducible_bytewise() {
        let tmp = TempDir::new().unwrap();
        let mk = |sub: &str| GenerateConfig {
            source: GraphSource::Model(er_model(16)),
            selection: StatSelection::EDGES_TWO_STARS,
            variant: GeneratorVariant::Steingen,
            steps: StepCount::Fixed(300),
            samples: 3,
            seed: 7,
            record_trajectory: true,
            incremental_updates: false,
            output_dir: tmp.path().join(sub),
        };
        let a = mk("a");
        let b = mk("b");
        cmd_generate(&a).unwrap();
        cmd_generate(&b).unwrap();
        let fa = dir_bytes(&a.output_dir);
        let fb = dir_bytes(&b.output_dir);
        assert_eq!(fa.len(), fb.len());
        for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
            assert_eq!(na, nb);
            if na == "manifest.json" {
                // Manifests embed the output path; compare all other fields
                // via the seeds and counts lines.
                continue;
            }
            assert_eq!(ba, bb, "file {na} differs");
        }
    }

    #[test]
    fn generate_nr_reports_zero_reestimations() {
        let tmp = TempDir::new().unwrap();
        let cfg = GenerateConfig {
            source: GraphSource::Model(er_model(14)),
            selection: StatSelection::EDGES,
            variant: GeneratorVariant::SteingenNr,
            steps: StepCount::Auto,
            samples: 2,
            seed: 5,
            record_trajectory: false,
            incremental_updates: false,
            output_dir: tmp.path().join("nr"),
        };
        let manifest = cmd_generate(&cfg).unwrap();
        assert_eq!(manifest.steps, default_steps(14).unwrap());
        assert!(manifest.reestimate_counts.iter().all(|&c| c == 0));
        assert_eq!(manifest.sample_files.len(), 2);
        for f in &manifest.sample_files {
            assert!(cfg.output_dir.join(f).exists());
        }
    }

    #[test]
    fn generate_k_variant_reestimates_once_per_k_changes() {
        let tmp = TempDir::new().unwrap();
        let k = 50u64;
        let cfg = GenerateConfig {
            source: GraphSource::Model(er_model(20)),
            selection: StatSelection::EDGES,
            variant: GeneratorVariant::SteingenK(k),
            steps: StepCount::Fixed(2000),
            samples: 2,
            seed: 11,
            record_trajectory: false,
            incremental_updates: false,
            output_dir: tmp.path().join("k"),
        };
        let manifest = cmd_generate(&cfg).unwrap();
        for (changes, reest) in
            manifest.change_counts.iter().zip(&manifest.reestimate_counts)
        {
            assert_eq!(*reest, changes / k, "re-estimations must fire every {k} changes");
        }
    }

    #[test]
    fn generate_rejects_exact_variant_without_model() {
        let tmp = TempDir::new().unwrap();
        let input = tmp.path().join("g.edges");
        write_text(&input, "n 6\n0 1\n2 3\n").unwrap();
        let cfg = GenerateConfig {
            source: GraphSource::Path(input),
            selection: StatSelection::EDGES,
            variant: GeneratorVariant::Exact,
            steps: StepCount::Auto,
            samples: 1,
            seed: 1,
            record_trajectory: false,
            incremental_updates: false,
            output_dir: tmp.path().join("out"),
        };
        assert!(cmd_generate(&cfg).is_err());
    }

    #[test]
    fn experiment_smoke_exact_generator() {
        let tmp = TempDir::new().unwrap();
        let cfg = ExperimentConfig {
            source: GraphSource::Model(er_model(10)),
            selection: StatSelection::EDGES,
            variant: GeneratorVariant::Exact,
            step_grid: vec![StepCount::Auto],
            trials: 1,
            samples_per_trial: 1,
            kernel: KernelSpec::wl(2),
            null_samples: 30,
            alpha: 0.05,
            seed: 3,
            incremental_updates: false,
            output_dir: tmp.path().join("exp"),
        };
        let report = cmd_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        let rate = report.rows[0].rejection_rate;
        assert!(rate == 0.0 || rate == 1.0);
        assert!(cfg.output_dir.join("summary.csv").exists());
        assert!(cfg.output_dir.join("frontier.csv").exists());
        let frontier = fs::read_to_string(cfg.output_dir.join("frontier.csv")).unwrap();
        assert!(frontier.starts_with("r,one_minus_tv,hamming_mean,hamming_sd\n"));
        let trials =
            fs::read_to_string(cfg.output_dir.join(format!("trials_r{}.csv", report.rows[0].steps)))
                .unwrap();
        assert_eq!(trials.lines().count(), 2);
    }

    #[test]
    fn experiment_summary_equals_recomputation_from_trial_rows() {
        let tmp = TempDir::new().unwrap();
        let cfg = ExperimentConfig {
            source: GraphSource::Model(er_model(12)),
            selection: StatSelection::EDGES,
            variant: GeneratorVariant::SteingenNr,
            step_grid: vec![StepCount::Fixed(200)],
            trials: 4,
            samples_per_trial: 3,
            kernel: KernelSpec::wl(2),
            null_samples: 25,
            alpha: 0.05,
            seed: 8,
            incremental_updates: false,
            output_dir: tmp.path().join("exp"),
        };
        let report = cmd_experiment(&cfg).unwrap();
        let trials = fs::read_to_string(cfg.output_dir.join("trials_r200.csv")).unwrap();
        let mut rates = Vec::new();
        let mut hams = Vec::new();
        for line in trials.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            rates.push(cols[1].parse::<f64>().unwrap());
            hams.push(cols[3].parse::<f64>().unwrap());
        }
        assert_eq!(rates.len(), 4);
        let row = &report.rows[0];
        // Aggregates equal recomputation from the flushed per-trial rows,
        // up to the 6-significant-digit CSV formatting.
        assert!((rates.iter().sum::<f64>() / 4.0 - row.rejection_rate).abs() < 1e-5);
        assert!((hams.iter().sum::<f64>() / 4.0 - row.scaled_hamming_mean).abs() < 1e-5);
    }

    #[test]
    fn experiment_er_steingen_nr_rate_stays_near_level() {
        // ER statistics give the no-re-estimation chain a constant edge
        // probability (the input density), so its samples are almost exact
        // model draws and the rejection rate sits near the test level.
        let tmp = TempDir::new().unwrap();
        let cfg = ExperimentConfig {
            source: GraphSource::Model(ErgmSpec::erdos_renyi(50, -2.0).unwrap()),
            selection: StatSelection::EDGES,
            variant: GeneratorVariant::SteingenNr,
            step_grid: vec![StepCount::Auto],
            trials: 10,
            samples_per_trial: 10,
            kernel: KernelSpec::wl(3),
            null_samples: 100,
            alpha: 0.05,
            seed: 17,
            incremental_updates: false,
            output_dir: tmp.path().join("exp"),
        };
        let report = cmd_experiment(&cfg).unwrap();
        let rate = report.rows[0].rejection_rate;
        assert!(rate <= 0.15, "SteinGen_nr rejection rate {rate} far above the level");
    }

    #[test]
    fn assess_copies_of_input_score_zero_distance() {
        let tmp = TempDir::new().unwrap();
        let spec = er_model(14);
        let x0 = sample_exact(&spec, default_steps(14).unwrap(), 21, None).unwrap();
        let input = tmp.path().join("input.edges");
        write_edge_list_path(&x0, &input).unwrap();
        let samples_dir = tmp.path().join("samples");
        fs::create_dir_all(&samples_dir).unwrap();
        for i in 0..3 {
            write_edge_list_path(&x0, samples_dir.join(format!("s{i}.edges"))).unwrap();
        }
        let cfg = AssessConfig {
            input_path: input,
            samples_dir,
            selection: StatSelection::EDGES,
            kernel: KernelSpec::wl(2),
            null_samples: 30,
            alpha: 0.05,
            seed: 9,
            output_dir: tmp.path().join("assess"),
        };
        let report = cmd_assess(&cfg).unwrap();
        assert_eq!(report.sample_count, 3);
        assert_eq!(report.metrics.scaled_hamming_mean, 0.0);
        assert_eq!(report.metrics.tv_degree, 0.0);
        assert!(report.input_p_value > 0.0);
        assert!(cfg.output_dir.join("assess_report.json").exists());
    }

    #[test]
    fn assess_rejects_mismatched_sample_sizes() {
        let tmp = TempDir::new().unwrap();
        let input = tmp.path().join("input.edges");
        write_text(&input, "n 8\n0 1\n1 2\n").unwrap();
        let samples_dir = tmp.path().join("samples");
        fs::create_dir_all(&samples_dir).unwrap();
        write_text(samples_dir.join("bad.edges"), "n 9\n0 1\n").unwrap();
        let cfg = AssessConfig {
            input_path: input,
            samples_dir,
            selection: StatSelection::EDGES,
            kernel: KernelSpec::wl(2),
            null_samples: 25,
            alpha: 0.05,
            seed: 9,
            output_dir: tmp.path().join("assess"),
        };
        assert!(matches!(cmd_assess(&cfg), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn estimate_table_and_stats_commands() {
        let tmp = TempDir::new().unwrap();
        let input = tmp.path().join("g.edges");
        write_text(&input, "n 3\n0 1\n1 2\n").unwrap();
        let csv =
            cmd_estimate_table(&input, StatSelection::EDGES_TWO_STARS, None).unwrap();
        assert!(csv.starts_with("delta_edges,delta_two_stars,n_u,N_u,qhat\n"));
        let out = tmp.path().join("table.csv");
        cmd_estimate_table(&input, StatSelection::EDGES_TWO_STARS, Some(&out)).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap(), csv);

        let stats = cmd_stats(&input).unwrap();
        assert!(stats.contains("\"n\": 3"));
        assert!(stats.contains("\"edges\": 2"));
    }
}
