//! Fidelity and diversity metrics: degree-distribution total variation,
//! scaled Hamming statistics, theoretical reference values, and the network
//! summary statistics used in report tables.

use crate::ergm::{sample_exact, solve_fixed_point_mean_field, ErgmSpec};
use crate::error::{Error, Result};
use crate::graph::{hamming, Graph};
use crate::stats::{count_statistics, StatSelection};
use crate::util::derive_seed;
use serde::Serialize;
use std::collections::VecDeque;

/// Total variation distance between the empirical degree distributions:
/// ½ Σ_k |G¹(k) − G²(k)| with Gⁱ(k) the fraction of vertices of degree k.
pub fn degree_tv(g1: &Graph, g2: &Graph) -> Result<f64> {
    if g1.n() != g2.n() {
        return Err(Error::DimensionMismatch { left: g1.n(), right: g2.n() });
    }
    let n = g1.n();
    let mut h1 = vec![0u32; n];
    let mut h2 = vec![0u32; n];
    for &d in g1.degrees() {
        h1[d as usize] += 1;
    }
    for &d in g2.degrees() {
        h2[d as usize] += 1;
    }
    let nf = n as f64;
    let sum: f64 = h1
        .iter()
        .zip(&h2)
        .map(|(&a, &b)| (f64::from(a) / nf - f64::from(b) / nf).abs())
        .sum();
    Ok(0.5 * sum)
}

/// Standard network summaries for report tables.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SummaryStats {
    pub density: f64,
    pub two_stars: f64,
    pub triangles: f64,
    /// Mean shortest-path length over connected pairs within the largest
    /// connected component; 0 when that component is a single vertex.
    pub avg_shortest_path: f64,
    /// Vertex count of the largest connected component.
    pub lcc_size: f64,
    /// Pearson correlation of endpoint degrees over edges; 0 when undefined
    /// (no edges or constant degrees).
    pub assortativity: f64,
    /// Global transitivity 3T / S2, in [0, 1]; 0 when there are no 2-stars.
    pub clustering: f64,
    pub max_degree: f64,
}

impl SummaryStats {
    pub(crate) fn fields(&self) -> [f64; 8] {
        [
            self.density,
            self.two_stars,
            self.triangles,
            self.avg_shortest_path,
            self.lcc_size,
            self.assortativity,
            self.clustering,
            self.max_degree,
        ]
    }

    pub(crate) fn from_fields(f: [f64; 8]) -> Self {
        Self {
            density: f[0],
            two_stars: f[1],
            triangles: f[2],
            avg_shortest_path: f[3],
            lcc_size: f[4],
            assortativity: f[5],
            clustering: f[6],
            max_degree: f[7],
        }
    }

    pub const FIELD_NAMES: [&'static str; 8] = [
        "density",
        "two_stars",
        "triangles",
        "avg_shortest_path",
        "lcc_size",
        "assortativity",
        "clustering",
        "max_degree",
    ];
}

fn components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Computes the summary statistics of one graph.
pub fn summary_statistics(g: &Graph) -> SummaryStats {
    let counts = count_statistics(g, StatSelection::ALL);
    let (s2, t) = (counts[1] as f64, counts[2] as f64);

    let comps = components(g);
    let lcc = comps.iter().max_by_key(|c| c.len()).expect("n >= 1 guarantees a component");

    // BFS from every LCC vertex; average over ordered connected pairs equals
    // the average over unordered ones.
    let mut sp_sum = 0u64;
    let mut sp_pairs = 0u64;
    if lcc.len() > 1 {
        let mut dist = vec![usize::MAX; g.n()];
        let mut queue = VecDeque::new();
        for &src in lcc {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(v) = queue.pop_front() {
                for u in g.neighbors(v) {
                    if dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            for &v in lcc {
                if v != src {
                    sp_sum += dist[v] as u64;
                    sp_pairs += 1;
                }
            }
        }
    }

    // Degree assortativity over both orientations of every edge.
    let mut assort = 0.0;
    if g.edge_count() > 0 {
        let (mut sx, mut sxx, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
        let m2 = (2 * g.edge_count()) as f64;
        for (i, j) in g.edge_list() {
            let (di, dj) = (f64::from(g.degree(i)), f64::from(g.degree(j)));
            sx += di + dj;
            sxx += di * di + dj * dj;
            sxy += 2.0 * di * dj;
        }
        let mean = sx / m2;
        let var = sxx / m2 - mean * mean;
        if var > 1e-12 {
            assort = (sxy / m2 - mean * mean) / var;
        }
    }

    SummaryStats {
        density: g.density(),
        two_stars: s2,
        triangles: t,
        avg_shortest_path: if sp_pairs > 0 { sp_sum as f64 / sp_pairs as f64 } else { 0.0 },
        lcc_size: lcc.len() as f64,
        assortativity: assort,
        clustering: if s2 > 0.0 { 3.0 * t / s2 } else { 0.0 },
        max_degree: f64::from(g.degrees().iter().copied().max().unwrap_or(0)),
    }
}

/// Fidelity/diversity metrics of a sample batch against its input graph.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsRecord {
    /// Mean degree-distribution TV distance to the input.
    pub tv_degree: f64,
    /// Mean of hamming(x0, sample) / N.
    pub scaled_hamming_mean: f64,
    /// Population standard deviation of the scaled Hamming distances.
    pub scaled_hamming_sd: f64,
    pub summary_mean: SummaryStats,
    pub summary_sd: SummaryStats,
    /// Theoretical references (hamming limit 2a*(1−a*), TV bound (nπ)^{-1/2})
    /// when a model is available.
    pub reference: Option<(f64, f64)>,
}

impl MetricsRecord {
    pub const CSV_HEADER: &'static str = "tv_degree,scaled_hamming_mean,scaled_hamming_sd,density,two_stars,triangles,avg_shortest_path,lcc_size,assortativity,clustering,max_degree";

    /// One CSV row matching [`Self::CSV_HEADER`] (summary means only).
    pub fn to_csv_row(&self) -> String {
        let mut cols = vec![
            crate::util::fmt_sig(self.tv_degree, 6),
            crate::util::fmt_sig(self.scaled_hamming_mean, 6),
            crate::util::fmt_sig(self.scaled_hamming_sd, 6),
        ];
        cols.extend(self.summary_mean.fields().iter().map(|&v| crate::util::fmt_sig(v, 6)));
        cols.join(",")
    }
}

/// Mean/sd (population) over a slice.
fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Computes batch fidelity (degree TV to `x0`) and diversity (scaled Hamming
/// to `x0`) together with averaged summary statistics.
pub fn batch_fidelity_diversity(x0: &Graph, samples: &[Graph]) -> Result<MetricsRecord> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("batch_fidelity_diversity needs samples"));
    }
    let big_n = x0.pair_count() as f64;
    let mut tvs = Vec::with_capacity(samples.len());
    let mut hams = Vec::with_capacity(samples.len());
    let mut summaries: Vec<[f64; 8]> = Vec::with_capacity(samples.len());
    for s in samples {
        tvs.push(degree_tv(x0, s)?);
        hams.push(hamming(x0, s)? as f64 / big_n);
        summaries.push(summary_statistics(s).fields());
    }
    let (tv_mean, _) = mean_sd(&tvs);
    let (h_mean, h_sd) = mean_sd(&hams);
    let mut mean_fields = [0.0; 8];
    let mut sd_fields = [0.0; 8];
    for k in 0..8 {
        let col: Vec<f64> = summaries.iter().map(|s| s[k]).collect();
        let (m, sd) = mean_sd(&col);
        mean_fields[k] = m;
        sd_fields[k] = sd;
    }
    Ok(MetricsRecord {
        tv_degree: tv_mean,
        scaled_hamming_mean: h_mean,
        scaled_hamming_sd: h_sd,
        summary_mean: SummaryStats::from_fields(mean_fields),
        summary_sd: SummaryStats::from_fields(sd_fields),
        reference: None,
    })
}

/// Theoretical reference pair for a model: the limiting scaled Hamming
/// distance 2a*(1−a*) from the Bernoulli fixed point, and the degree-TV
/// guideline (nπ)^{-1/2}.
pub fn reference_values(spec: &ErgmSpec) -> Result<(f64, f64)> {
    let fp = solve_fixed_point_mean_field(spec)?;
    let tv_bound = 1.0 / (spec.n() as f64 * std::f64::consts::PI).sqrt();
    Ok((fp.hamming_limit, tv_bound))
}

/// Simulates the null degree-TV level: mean TV between independent pairs of
/// exact samples from `spec`.
pub fn simulate_null_tv(spec: &ErgmSpec, steps: u64, replicates: usize, seed: u64) -> Result<f64> {
    if replicates == 0 {
        return Err(Error::InvalidConfig("null TV simulation needs replicates".into()));
    }
    let mut acc = 0.0;
    for i in 0..replicates as u64 {
        let a = sample_exact(spec, steps, derive_seed(seed, 2 * i), None)?;
        let b = sample_exact(spec, steps, derive_seed(seed, 2 * i + 1), None)?;
        acc += degree_tv(&a, &b)?;
    }
    Ok(acc / replicates as f64)
}
