//! Exponential random graph models: exact conditional edge probabilities,
//! the single-edge Glauber chain used as ground-truth sampler, the
//! coupon-collector step-count rule, and the Bernoulli fixed point a*.
//!
//! Counts are raw (E, S2, T) throughout; the normalised scaling of the
//! subgraph densities only enters the fixed-point solver, which converts
//! coefficients internally.

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, VertexPair};
use crate::stats::{change_statistics, ChangeStats, StatSelection, Statistic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Euler-Mascheroni constant.
pub const EULER_MASCHERONI: f64 = 0.5772156649;

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// A source of conditional edge probabilities q(s,1 | Δ_s t(x)).
///
/// Implemented by [`ErgmSpec`] (exact, model-derived) and by the estimated
/// conditional table, so samplers and Stein statistics can run against
/// either interchangeably.
pub trait ConditionalModel {
    fn selection(&self) -> StatSelection;
    /// Probability that the resampled indicator is 1, given the change
    /// statistics of the chosen pair.
    fn edge_probability(&self, delta: &ChangeStats) -> f64;
}

/// An ERGM over graphs on `n` vertices: an ordered statistic selection
/// (edges always included and first) and one coefficient per statistic.
#[derive(Clone, Debug, Serialize)]
pub struct ErgmSpec {
    n: usize,
    #[serde(rename = "statistics")]
    selection: StatSelection,
    beta: Vec<f64>,
}

impl ErgmSpec {
    pub fn new(n: usize, selection: StatSelection, beta: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidVertexCount { n, reason: "an ERGM needs at least 2 vertices" });
        }
        if !selection.contains(Statistic::Edges) {
            return Err(Error::InvalidConfig("the edges statistic must be included".into()));
        }
        if beta.len() != selection.len() {
            return Err(Error::BetaLengthMismatch { selected: selection.len(), given: beta.len() });
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("beta coefficients must be finite".into()));
        }
        Ok(Self { n, selection, beta })
    }

    /// Bernoulli random graph: edges appear independently with probability
    /// `sigmoid(beta1)`.
    pub fn erdos_renyi(n: usize, beta1: f64) -> Result<Self> {
        Self::new(n, StatSelection::EDGES, vec![beta1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn statistic_selection(&self) -> StatSelection {
        self.selection
    }

    /// q(s,1 | Δ_s t(x)) = sigmoid(β · Δ); in (0, 1) and monotone in β · Δ.
    pub fn conditional_probability(&self, delta: &ChangeStats) -> f64 {
        assert_eq!(delta.len(), self.beta.len(), "change statistics do not match the selection");
        sigmoid(delta.dot(&self.beta))
    }

    /// Probability of the complementary resample; equals
    /// `1 - conditional_probability` exactly.
    pub fn absence_probability(&self, delta: &ChangeStats) -> f64 {
        1.0 - self.conditional_probability(delta)
    }

    /// Unnormalised log-density β · t(x) with raw counts.
    pub fn log_weight(&self, g: &Graph) -> f64 {
        let counts = crate::stats::count_statistics(g, self.selection);
        counts.iter().zip(&self.beta).map(|(&c, &b)| c as f64 * b).sum()
    }
}

impl<'de> Deserialize<'de> for ErgmSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            statistics: StatSelection,
            beta: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        ErgmSpec::new(raw.n, raw.statistics, raw.beta).map_err(serde::de::Error::custom)
    }
}

impl ConditionalModel for ErgmSpec {
    fn selection(&self) -> StatSelection {
        self.selection
    }

    fn edge_probability(&self, delta: &ChangeStats) -> f64 {
        self.conditional_probability(delta)
    }
}

/// Draws a uniform vertex pair and resamples its indicator from `model`.
/// Returns the pair and whether the graph changed.
///
/// Exactly two RNG draws per call (pair index, then uniform), so any two
/// chains driven by the same seed and probabilities stay in lockstep.
pub fn resample_edge<M: ConditionalModel, R: Rng>(
    graph: &mut Graph,
    model: &M,
    rng: &mut R,
) -> (VertexPair, bool) {
    let idx = rng.random_range(0..graph.pair_count());
    let pair = VertexPair::from_index(idx, graph.n()).expect("index in range");
    let delta = change_statistics(graph, pair, model.selection());
    let p = model.edge_probability(&delta);
    let new_value = rng.random::<f64>() < p;
    let changed = graph.set_edge(pair, new_value);
    (pair, changed)
}

/// State of one Glauber chain: current graph, step counter, RNG stream.
pub struct GlauberState {
    pub graph: Graph,
    pub step: u64,
    rng: ChaCha8Rng,
}

impl GlauberState {
    pub fn new(graph: Graph, seed: u64) -> Self {
        Self { graph, step: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// One Glauber transition: a uniformly chosen pair has its indicator
    /// resampled from the exact conditional; all other indicators unchanged.
    pub fn advance(&mut self, spec: &ErgmSpec) -> (VertexPair, bool) {
        let out = resample_edge(&mut self.graph, spec, &mut self.rng);
        self.step += 1;
        out
    }
}

/// Runs the exact Glauber chain for `steps` transitions from `init`
/// (empty graph if `None`). Deterministic given the seed.
pub fn sample_exact(spec: &ErgmSpec, steps: u64, seed: u64, init: Option<&Graph>) -> Result<Graph> {
    let graph = match init {
        Some(g) => {
            if g.n() != spec.n {
                return Err(Error::DimensionMismatch { left: spec.n, right: g.n() });
            }
            g.clone()
        }
        None => Graph::empty(spec.n)?,
    };
    let mut state = GlauberState::new(graph, seed);
    for _ in 0..steps {
        state.advance(spec);
    }
    Ok(state.graph)
}

/// Step-count rule r = ceil(N ln N + γN + 1/2), the expected time until
/// every vertex pair has been selected at least once.
pub fn default_steps(n: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidVertexCount { n, reason: "step rule needs at least 2 vertices" });
    }
    let big_n = pair_count(n) as f64;
    Ok((big_n * big_n.ln() + EULER_MASCHERONI * big_n + 0.5).ceil() as u64)
}

/// Result of the Bernoulli-approximation fixed point a*.
#[derive(Clone, Copy, Debug)]
pub struct FixedPoint {
    /// Edge probability of the approximating Bernoulli random graph.
    pub a_star: f64,
    /// 2 a*(1 - a*), the limiting per-step flip rate / scaled Hamming limit.
    pub hamming_limit: f64,
    /// (1/2)|Φ|'(1) under the normalised coefficients; the high-temperature
    /// regime requires this to be below 1.
    pub contraction_bound: f64,
    /// Whether the contraction bound is within the high-temperature regime
    /// (up to a small numerical slack at the boundary).
    pub assumption_satisfied: bool,
    pub iterations: usize,
}

/// Coefficients in the normalised-density scaling: edges enter as twice the
/// edge count, 2-stars and triangles are divided by n (with automorphism
/// multiplicities 2 and 6).
fn normalized_beta(spec: &ErgmSpec) -> Vec<(f64, u32)> {
    let n = spec.n as f64;
    spec.statistic_selection()
        .iter()
        .zip(spec.beta())
        .map(|(stat, &b)| {
            let scaled = match stat {
                Statistic::Edges => b / 2.0,
                Statistic::TwoStars => b * n / 2.0,
                Statistic::Triangles => b * n / 6.0,
            };
            (scaled, stat.subgraph_edges())
        })
        .collect()
}

fn solve_damped<F: Fn(f64) -> f64>(f: &F) -> Result<(f64, usize)> {
    const TOL: f64 = 1e-10;
    let mut a = 0.5;
    for it in 0..10_000 {
        let fa = f(a);
        if (fa - a).abs() < TOL {
            return Ok((a, it));
        }
        a = 0.5 * (a + fa);
    }
    // Bisection fallback on [0,1]; g(0) >= 0 and g(1) <= 0 because f maps
    // into [0,1].
    let g = |a: f64| f(a) - a;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if g(lo) < 0.0 || g(hi) > 0.0 {
        return Err(Error::AssumptionViolated("no bracketed root in [0,1]".into()));
    }
    for it in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).abs() < TOL {
            return Ok((mid, 10_000 + it));
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    if (f(a) - a).abs() < TOL {
        Ok((a, 10_200))
    } else {
        Err(Error::AssumptionViolated("damped iteration and bisection did not converge".into()))
    }
}

fn detect_multiple_roots<F: Fn(f64) -> f64>(f: &F) -> bool {
    const GRID: usize = 1000;
    let mut crossings = 0usize;
    let mut prev = f(0.0) - 0.0;
    for k in 1..=GRID {
        let a = k as f64 / GRID as f64;
        let cur = f(a) - a;
        if prev.signum() != cur.signum() && prev != 0.0 && cur != 0.0 {
            crossings += 1;
        }
        prev = cur;
    }
    crossings > 1
}

fn finish_fixed_point<F: Fn(f64) -> f64>(f: F, contraction_bound: f64) -> Result<FixedPoint> {
    if detect_multiple_roots(&f) {
        return Err(Error::AssumptionViolated("multiple fixed points detected by sign scan".into()));
    }
    let (a_star, iterations) = solve_damped(&f)?;
    Ok(FixedPoint {
        a_star,
        hamming_limit: 2.0 * a_star * (1.0 - a_star),
        contraction_bound,
        assumption_satisfied: contraction_bound < 1.0 + 1e-9,
        iterations,
    })
}

/// Solves φ(a) = a with φ(a) = (1 + tanh Φ(a))/2 and
/// Φ(a) = Σ_l β_l e_l a^(e_l - 1) over the normalised coefficients.
pub fn solve_fixed_point(spec: &ErgmSpec) -> Result<FixedPoint> {
    let coeffs = normalized_beta(spec);
    let phi = move |a: f64| -> f64 {
        coeffs
            .iter()
            .map(|&(b, e)| b * f64::from(e) * a.powi(e as i32 - 1))
            .sum()
    };
    let contraction = normalized_beta(spec)
        .iter()
        .map(|&(b, e)| b.abs() * f64::from(e) * f64::from(e - 1))
        .sum::<f64>()
        / 2.0;
    finish_fixed_point(move |a| 0.5 * (1.0 + phi(a).tanh()), contraction)
}

/// Mean-field variant for raw-count specs: solves
/// a = sigmoid(β1 + 2 β2 (n-1) a + β3 (n-2) a²),
/// the self-consistent edge probability when every conditional sees the
/// average change statistics of a Bernoulli(a) graph.
pub fn solve_fixed_point_mean_field(spec: &ErgmSpec) -> Result<FixedPoint> {
    let n = spec.n as f64;
    let mut b = [0.0f64; 3];
    for (stat, &coef) in spec.statistic_selection().iter().zip(spec.beta()) {
        match stat {
            Statistic::Edges => b[0] = coef,
            Statistic::TwoStars => b[1] = coef,
            Statistic::Triangles => b[2] = coef,
        }
    }
    let contraction = solve_fixed_point(spec)?.contraction_bound;
    finish_fixed_point(
        move |a| sigmoid(b[0] + 2.0 * b[1] * (n - 1.0) * a + b[2] * (n - 2.0) * a * a),
        contraction,
    )
}
