//! Simple undirected graphs stored as bit-packed adjacency rows with cached
//! degrees, plus canonical vertex-pair indexing and Hamming distance.
//!
//! The representation targets Glauber-style edge resampling: O(1) edge tests
//! and flips, and neighbour intersections via word-wise AND + popcount.

use crate::error::{Error, Result};
use rand::Rng;

/// An unordered vertex pair `(i, j)` with `i < j`, together with its
/// canonical row-major linear index among the `N = n(n-1)/2` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexPair {
    i: usize,
    j: usize,
    index: usize,
}

impl VertexPair {
    /// Builds the pair `(i, j)` for a graph on `n` vertices.
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i >= j || j >= n {
            return Err(Error::InvalidVertexPair { i, j, n });
        }
        // Row-major offset of row i, then position of j within the row.
        let index = i * n - i * (i + 1) / 2 + (j - i - 1);
        Ok(Self { i, j, index })
    }

    /// Recovers the pair from its canonical linear index.
    pub fn from_index(index: usize, n: usize) -> Result<Self> {
        let total = pair_count(n);
        if index >= total {
            return Err(Error::InvalidVertexPair { i: index, j: index, n });
        }
        // Invert the row-major layout: find the largest i whose row starts
        // at or before `index`. A closed form via sqrt would work; the loop
        // is exact and n is small enough that tests cover it anyway.
        let mut i = 0usize;
        let mut row_start = 0usize;
        while row_start + (n - i - 1) <= index {
            row_start += n - i - 1;
            i += 1;
        }
        let j = i + 1 + (index - row_start);
        Ok(Self { i, j, index })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

/// Number of possible edges `N = n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A simple undirected unlabeled graph on `n` vertices.
///
/// Adjacency is symmetric with an empty diagonal. Rows are bit-packed into
/// `u64` words; `degrees[v]` is kept in sync with the rows at all times.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    degrees: Vec<u32>,
    edges: usize,
}

impl Graph {
    /// Creates the empty graph on `n >= 1` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidVertexCount { n, reason: "graph needs at least one vertex" });
        }
        let stride = n.div_ceil(64);
        Ok(Self { n, stride, rows: vec![0; n * stride], degrees: vec![0; n], edges: 0 })
    }

    /// Creates the complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                g.set_edge_raw(i, j, true);
            }
        }
        Ok(g)
    }

    /// Builds a graph from an edge list; duplicate edges are idempotent.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            let (i, j) = if u < v { (u, v) } else { (v, u) };
            let pair = VertexPair::new(i, j, n)?;
            g.set_edge(pair, true);
        }
        Ok(g)
    }

    /// Samples a Bernoulli random graph where each edge is present
    /// independently with probability `p`.
    pub fn bernoulli<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    g.set_edge_raw(i, j, true);
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of possible edges `N`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Edge density `E / N` (0 for a single-vertex graph).
    pub fn density(&self) -> f64 {
        let total = self.pair_count();
        if total == 0 {
            0.0
        } else {
            self.edges as f64 / total as f64
        }
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n && i != j);
        self.rows[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn has_edge_at(&self, pair: VertexPair) -> bool {
        self.has_edge(pair.i, pair.j)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// The bit-packed neighbour row of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    /// `|N(i) ∩ N(j)|`. Vertices i and j never appear in the intersection:
    /// rows have an empty diagonal, so bit i is absent from row i and bit j
    /// from row j.
    #[inline]
    pub fn common_neighbors(&self, i: usize, j: usize) -> u32 {
        let (ri, rj) = (i * self.stride, j * self.stride);
        let mut acc = 0u32;
        for w in 0..self.stride {
            acc += (self.rows[ri + w] & self.rows[rj + w]).count_ones();
        }
        acc
    }

    /// Neighbours of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degrees[v] as usize);
        let base = v * self.stride;
        for w in 0..self.stride {
            let mut bits = self.rows[base + w];
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    fn set_edge_raw(&mut self, i: usize, j: usize, present: bool) -> bool {
        let was = self.has_edge(i, j);
        if was == present {
            return false;
        }
        let (wi, wj) = (i * self.stride + j / 64, j * self.stride + i / 64);
        self.rows[wi] ^= 1 << (j % 64);
        self.rows[wj] ^= 1 << (i % 64);
        if present {
            self.degrees[i] += 1;
            self.degrees[j] += 1;
            self.edges += 1;
        } else {
            self.degrees[i] -= 1;
            self.degrees[j] -= 1;
            self.edges -= 1;
        }
        true
    }

    /// Sets the indicator at `pair`; returns whether the graph changed.
    #[inline]
    pub fn set_edge(&mut self, pair: VertexPair, present: bool) -> bool {
        self.set_edge_raw(pair.i, pair.j, present)
    }

    /// Toggles the indicator at `pair` in place.
    #[inline]
    pub fn toggle(&mut self, pair: VertexPair) {
        let present = self.has_edge(pair.i, pair.j);
        self.set_edge_raw(pair.i, pair.j, !present);
    }

    /// Returns a copy of the graph with the indicator at `pair` flipped.
    pub fn flipped(&self, pair: VertexPair) -> Graph {
        let mut g = self.clone();
        g.toggle(pair);
        g
    }

    /// Iterates all vertex pairs in canonical index order.
    pub fn pairs(&self) -> impl Iterator<Item = VertexPair> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            ((i + 1)..n).map(move |j| VertexPair::new(i, j, n).expect("valid pair"))
        })
    }

    /// Edges as `(i, j)` with `i < j`, in canonical order.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for i in 0..self.n {
            for j in self.neighbors(i) {
                if j > i {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Applies a vertex relabeling: vertex `v` of `self` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: perm.len() });
        }
        let mut g = Graph::empty(self.n)?;
        for (i, j) in self.edge_list() {
            let (a, b) = (perm[i], perm[j]);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            let pair = VertexPair::new(a, b, self.n)?;
            g.set_edge(pair, true);
        }
        Ok(g)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edge_list())
    }
}

/// Hamming distance: the number of vertex pairs whose indicators differ.
pub fn hamming(g1: &Graph, g2: &Graph) -> Result<u64> {
    if g1.n != g2.n {
        return Err(Error::DimensionMismatch { left: g1.n, right: g2.n });
    }
    let mut diff = 0u64;
    for (a, b) in g1.rows.iter().zip(&g2.rows) {
        diff += u64::from((a ^ b).count_ones());
    }
    // Each differing pair is counted once per endpoint row.
    Ok(diff / 2)
}
