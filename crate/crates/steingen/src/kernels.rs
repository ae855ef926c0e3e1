//! Graph kernels used inside the kernelized Stein statistics.
//!
//! WL, shortest-path and constant kernels expose explicit feature maps
//! (cosine-normalised, so K(g,g) = 1), which lets the quadratic forms in
//! [`crate::stein`] collapse a double sum into one weighted feature vector.
//! The Gaussian vertex-edge histogram kernel has no finite feature map and
//! is evaluated pairwise.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::util::fnv1a_u64s;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// Weisfeiler-Lehman subtree kernel with constant initial labels.
    #[serde(rename = "wl", alias = "weisfeiler_lehman")]
    WeisfeilerLehman,
    /// Gaussian kernel on concatenated degree and edge-count histograms.
    #[serde(rename = "gveh", alias = "gaussian_vertex_edge_histogram")]
    GaussianVertexEdgeHistogram,
    /// Histogram of pairwise shortest-path lengths; disconnected pairs get
    /// their own bin.
    #[serde(rename = "shortest_path", alias = "sp")]
    ShortestPath,
    /// K(g, h) = 1 for all graphs.
    #[serde(rename = "constant", alias = "const")]
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Number of WL refinement iterations (level 0 is the initial labeling).
    #[serde(default = "default_wl_levels")]
    pub wl_levels: usize,
    /// Bandwidth of the Gaussian histogram kernel.
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
}

fn default_wl_levels() -> usize {
    3
}

fn default_bandwidth() -> f64 {
    1.0
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self { family: KernelFamily::WeisfeilerLehman, wl_levels: 3, bandwidth: 1.0 }
    }
}

impl KernelSpec {
    pub fn wl(levels: usize) -> Self {
        Self { family: KernelFamily::WeisfeilerLehman, wl_levels: levels, ..Self::default() }
    }

    pub fn constant() -> Self {
        Self { family: KernelFamily::Constant, ..Self::default() }
    }

    pub fn shortest_path() -> Self {
        Self { family: KernelFamily::ShortestPath, ..Self::default() }
    }

    pub fn gveh(bandwidth: f64) -> Self {
        Self { family: KernelFamily::GaussianVertexEdgeHistogram, bandwidth, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bandwidth <= 0.0 || !self.bandwidth.is_finite() {
            return Err(Error::InvalidConfig(format!("bandwidth must be positive, got {}", self.bandwidth)));
        }
        Ok(())
    }

    /// Whether the kernel is an inner product of explicit feature vectors.
    pub fn has_feature_map(&self) -> bool {
        !matches!(self.family, KernelFamily::GaussianVertexEdgeHistogram)
    }

    /// Extracts the representation `eval_features` consumes.
    pub fn features(&self, g: &Graph) -> GraphFeatures {
        match self.family {
            KernelFamily::Constant => GraphFeatures::Constant,
            KernelFamily::WeisfeilerLehman => {
                GraphFeatures::Normalized(normalize(wl_histogram(g, self.wl_levels)))
            }
            KernelFamily::ShortestPath => GraphFeatures::Normalized(normalize(sp_histogram(g))),
            KernelFamily::GaussianVertexEdgeHistogram => {
                GraphFeatures::Histogram(vertex_edge_histogram(g))
            }
        }
    }

    /// Kernel value from two feature representations of the same family.
    pub fn eval_features(&self, a: &GraphFeatures, b: &GraphFeatures) -> f64 {
        match (a, b) {
            (GraphFeatures::Constant, GraphFeatures::Constant) => 1.0,
            (GraphFeatures::Normalized(x), GraphFeatures::Normalized(y)) => sparse_dot(x, y),
            (GraphFeatures::Histogram(x), GraphFeatures::Histogram(y)) => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * self.bandwidth * self.bandwidth)).exp()
            }
            _ => unreachable!("mixed feature representations"),
        }
    }

    /// Symmetric positive-semidefinite kernel value; errors when the graphs
    /// have different vertex counts.
    pub fn eval(&self, g1: &Graph, g2: &Graph) -> Result<f64> {
        if g1.n() != g2.n() {
            return Err(Error::DimensionMismatch { left: g1.n(), right: g2.n() });
        }
        self.validate()?;
        Ok(self.eval_features(&self.features(g1), &self.features(g2)))
    }
}

/// Per-graph data consumed by [`KernelSpec::eval_features`].
#[derive(Clone, Debug)]
pub enum GraphFeatures {
    /// Sparse unit-norm feature vector, sorted by key.
    Normalized(Vec<(u64, f64)>),
    /// Raw concatenated histogram (degree counts then edge count).
    Histogram(Vec<f64>),
    Constant,
}

fn normalize(mut v: Vec<(u64, f64)>) -> Vec<(u64, f64)> {
    let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, x) in &mut v {
            *x /= norm;
        }
    }
    v
}

fn sparse_dot(a: &[(u64, f64)], b: &[(u64, f64)]) -> f64 {
    let mut acc = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Label histogram over `levels + 1` WL refinement rounds, starting from a
/// constant label. New labels hash the old label together with the sorted
/// neighbour labels; hashing is FNV-based so labels agree across graphs and
/// runs without a shared dictionary.
fn wl_histogram(g: &Graph, levels: usize) -> Vec<(u64, f64)> {
    let n = g.n();
    let mut counts: BTreeMap<u64, f64> = BTreeMap::new();
    let mut labels: Vec<u64> = vec![0; n];
    for level in 0..=levels {
        if level > 0 {
            let mut next = vec![0u64; n];
            let mut buf: Vec<u64> = Vec::with_capacity(n);
            for v in 0..n {
                buf.clear();
                buf.push(labels[v]);
                let mut neigh: Vec<u64> = g.neighbors(v).iter().map(|&u| labels[u]).collect();
                neigh.sort_unstable();
                buf.extend_from_slice(&neigh);
                next[v] = fnv1a_u64s(&buf);
            }
            labels = next;
        }
        for &label in &labels {
            // Tag with the level so identical hashes at different depths stay
            // distinct features.
            let key = fnv1a_u64s(&[level as u64, label]);
            *counts.entry(key).or_insert(0.0) += 1.0;
        }
    }
    counts.into_iter().collect()
}

/// Histogram of shortest-path lengths over unordered vertex pairs.
/// Disconnected pairs are binned under `u64::MAX`.
fn sp_histogram(g: &Graph) -> Vec<(u64, f64)> {
    let n = g.n();
    let mut counts: BTreeMap<u64, f64> = BTreeMap::new();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for src in 0..n {
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
        for (v, &d) in dist.iter().enumerate() {
            if v > src {
                let key = if d == usize::MAX { u64::MAX } else { d as u64 };
                *counts.entry(key).or_insert(0.0) += 1.0;
            }
        }
    }
    counts.into_iter().collect()
}

/// Degree histogram (bins 0..n-1) concatenated with the edge count.
fn vertex_edge_histogram(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut h = vec![0.0; n + 1];
    for &d in g.degrees() {
        h[d as usize] += 1.0;
    }
    h[n] = g.edge_count() as f64;
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn constant_kernel_is_one() {
        let k = KernelSpec::constant();
        let g = path3();
        let h = Graph::complete(3).unwrap();
        assert_eq!(k.eval(&g, &h).unwrap(), 1.0);
        assert_eq!(k.eval(&g, &g).unwrap(), 1.0);
    }

    #[test]
    fn wl_self_similarity_is_one() {
        let k = KernelSpec::wl(3);
        for g in [path3(), Graph::complete(6).unwrap(), Graph::empty(5).unwrap()] {
            let v = k.eval(&g, &g).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wl_level_zero_depends_only_on_n() {
        let k = KernelSpec::wl(0);
        let g = path3();
        let h = Graph::complete(3).unwrap();
        // Constant initial labels: level-0 features are n copies of one label.
        assert!((k.eval(&g, &h).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wl_level_one_sees_degrees() {
        let k = KernelSpec::wl(1);
        // Same degree multiset [0,1,1,2] in different labelings.
        let a = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(4, &[(1, 2), (2, 3)]).unwrap();
        assert!((k.eval(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        // Path vs triangle-with-isolated differ in degrees.
        let c = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(k.eval(&a, &c).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn wl_is_label_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let k = KernelSpec::wl(3);
        for _ in 0..10 {
            let g = Graph::bernoulli(9, 0.4, &mut rng).unwrap();
            let h = Graph::bernoulli(9, 0.4, &mut rng).unwrap();
            let mut perm: Vec<usize> = (0..9).collect();
            for i in (1..9usize).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let gp = g.relabeled(&perm).unwrap();
            let hp = h.relabeled(&perm).unwrap();
            assert!((k.eval(&g, &g.relabeled(&perm).unwrap()).unwrap() - 1.0).abs() < 1e-12);
            assert!((k.eval(&g, &h).unwrap() - k.eval(&gp, &hp).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn shortest_path_kernel_basics() {
        let k = KernelSpec::shortest_path();
        let g = path3();
        assert!((k.eval(&g, &g).unwrap() - 1.0).abs() < 1e-12);
        // Disconnected graphs are handled through the infinite bin.
        let disc = Graph::from_edges(4, &[(0, 1)]).unwrap();
        let v = k.eval(&disc, &disc).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let h = Graph::complete(4).unwrap();
        let cross = k.eval(&disc, &h).unwrap();
        assert!((0.0..1.0).contains(&cross));
    }

    #[test]
    fn gveh_kernel_basics() {
        let k = KernelSpec::gveh(1.0);
        let g = path3();
        let h = Graph::complete(3).unwrap();
        assert_eq!(k.eval(&g, &g).unwrap(), 1.0);
        let v = k.eval(&g, &h).unwrap();
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(v, k.eval(&h, &g).unwrap());
        // Wider bandwidth brings the value toward 1.
        let wide = KernelSpec::gveh(10.0);
        assert!(wide.eval(&g, &h).unwrap() > v);
        assert!(KernelSpec::gveh(0.0).eval(&g, &h).is_err());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let k = KernelSpec::wl(3);
        let g = path3();
        let h = Graph::empty(4).unwrap();
        assert!(k.eval(&g, &h).is_err());
    }

    #[test]
    fn gram_matrices_are_psd() {
        use nalgebra::DMatrix;
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for kernel in [
            KernelSpec::wl(3),
            KernelSpec::shortest_path(),
            KernelSpec::gveh(1.0),
            KernelSpec::constant(),
        ] {
            let graphs: Vec<Graph> =
                (0..15).map(|_| Graph::bernoulli(10, rng.random_range(0.1..0.9), &mut rng).unwrap()).collect();
            let m = graphs.len();
            let mut gram = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    gram[(i, j)] = kernel.eval(&graphs[i], &graphs[j]).unwrap();
                }
            }
            for i in 0..m {
                for j in 0..m {
                    assert!((gram[(i, j)] - gram[(j, i)]).abs() < 1e-12);
                }
            }
            let eigen = gram.symmetric_eigenvalues();
            for ev in eigen.iter() {
                assert!(*ev > -1e-8, "negative eigenvalue {ev} for {:?}", kernel.family);
            }
        }
    }

    #[test]
    fn kernel_spec_serde() {
        let k: KernelSpec = serde_json::from_str(r#"{"family":"wl"}"#).unwrap();
        assert_eq!(k.family, KernelFamily::WeisfeilerLehman);
        assert_eq!(k.wl_levels, 3);
        assert_eq!(k.bandwidth, 1.0);
        let k: KernelSpec =
            serde_json::from_str(r#"{"family":"gveh","bandwidth":2.5}"#).unwrap();
        assert_eq!(k.family, KernelFamily::GaussianVertexEdgeHistogram);
        assert_eq!(k.bandwidth, 2.5);
        let js = serde_json::to_string(&KernelSpec::shortest_path()).unwrap();
        assert!(js.contains("shortest_path"));
    }
}
