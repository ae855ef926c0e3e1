//! Synthetic graph generation from a single observed network, driven by
//! estimated Glauber dynamics, together with kernelized Stein statistics
//! (gKSS / AgraSSt) and degree/Hamming metrics for judging sample fidelity
//! and diversity.
//!
//! Modules:
//! - [`graph`], [`stats`]: bit-packed simple graphs, subgraph counts and
//!   per-pair change statistics.
//! - [`ergm`]: exponential random graph models, the exact Glauber sampler,
//!   the N log N step rule and the Bernoulli fixed point a*.
//! - [`estimator`]: the conditional edge-probability table q̂(s,1 | Δ_s t)
//!   estimated from observed graphs, with incremental flip updates.
//! - [`sampler`]: generation chains with per-change, k-step or no
//!   re-estimation, batch runs and min-statistic selection.
//! - [`kernels`], [`stein`]: graph kernels and the squared Stein statistics
//!   with Monte-Carlo test calibration.
//! - [`metrics`]: degree-TV, scaled Hamming, summary statistics and
//!   theoretical reference values.
//! - [`io`]: edge-list files; [`harness`]: the CLI-facing commands.

pub mod ergm;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod metrics;
pub mod sampler;
pub mod stats;
pub mod stein;
pub mod util;

pub use error::{Error, Result};
pub use ergm::{
    default_steps, sample_exact, solve_fixed_point, solve_fixed_point_mean_field,
    ConditionalModel, ErgmSpec, FixedPoint, GlauberState,
};
pub use estimator::{estimate_table, ConditionalTable};
pub use graph::{hamming, Graph, VertexPair};
pub use kernels::{KernelFamily, KernelSpec};
pub use metrics::{
    batch_fidelity_diversity, degree_tv, reference_values, summary_statistics, MetricsRecord,
    SummaryStats,
};
pub use sampler::{
    generate_with_model, select_by_gkss, steingen_batch, steingen_generate, GenRunConfig,
    ReestimateSchedule, ScoreModel, Trajectory,
};
pub use stats::{change_statistics, count_statistics, ChangeStats, StatSelection, Statistic};
pub use stein::{
    agrasst_squared, calibrate, calibrate_and_test, gkss_squared, rejection_rate, Calibration,
    Resample, SteinStatReport,
};
