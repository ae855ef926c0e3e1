//! Estimation of the conditional edge probability table from observed
//! graphs: for every vertex pair the change-statistic key accumulates how
//! often an edge is present, giving q̂(s,1 | Δ_s t = u) = n_u / N_u.

use crate::error::{Error, Result};
use crate::ergm::ConditionalModel;
use crate::graph::{Graph, VertexPair};
use crate::stats::{change_statistics, ChangeStats, StatSelection};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Per-key counts: `present` is n_u (pairs with an edge), `total` is N_u.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct KeyCounts {
    pub present: u64,
    pub total: u64,
}

/// Estimated conditional edge probabilities keyed by change statistics.
///
/// Keys are ordered, so iteration, nearest-key resolution and CSV dumps are
/// deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTable {
    selection: StatSelection,
    entries: BTreeMap<ChangeStats, KeyCounts>,
    edge_total: u64,
    pair_total: u64,
}

/// Estimates the table from one or more graphs on a common vertex count.
///
/// Every vertex pair s of every input graph contributes N_u += 1 and
/// n_u += x^(s) under its key u = Δ_s t(x).
pub fn estimate_table(graphs: &[&Graph], selection: StatSelection) -> Result<ConditionalTable> {
    if graphs.is_empty() {
        return Err(Error::EmptyInput("estimate_table needs at least one graph"));
    }
    let n = graphs[0].n();
    for g in graphs {
        if g.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: g.n() });
        }
    }
    let mut table = ConditionalTable {
        selection,
        entries: BTreeMap::new(),
        edge_total: 0,
        pair_total: 0,
    };
    for g in graphs {
        for s in g.pairs() {
            table.add_pair(g, s);
        }
    }
    Ok(table)
}

impl ConditionalTable {
    pub fn from_graph(g: &Graph, selection: StatSelection) -> Result<Self> {
        estimate_table(&[g], selection)
    }

    pub fn selection(&self) -> StatSelection {
        self.selection
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Global edge density over all contributing pairs; the last-resort
    /// probability when the table holds no keys at all.
    pub fn fallback_density(&self) -> f64 {
        if self.pair_total == 0 {
            0.0
        } else {
            self.edge_total as f64 / self.pair_total as f64
        }
    }

    /// Sum of n_u over all keys; equals the total edge count of the inputs.
    pub fn edge_total(&self) -> u64 {
        self.edge_total
    }

    /// Sum of N_u over all keys; equals N times the number of input graphs.
    pub fn pair_total(&self) -> u64 {
        self.pair_total
    }

    pub fn counts(&self, key: &ChangeStats) -> Option<KeyCounts> {
        self.entries.get(key).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ChangeStats, &KeyCounts)> {
        self.entries.iter()
    }

    /// q̂ at key u: the relative frequency n_u / N_u when the key was seen;
    /// otherwise the value at the nearest observed key in L1 distance, ties
    /// broken toward the lexicographically smaller key. An entirely empty
    /// table answers with the fallback density.
    pub fn lookup(&self, key: &ChangeStats) -> f64 {
        if let Some(c) = self.entries.get(key) {
            debug_assert!(c.total >= 1);
            return c.present as f64 / c.total as f64;
        }
        let mut best: Option<(u64, &KeyCounts)> = None;
        for (k, c) in &self.entries {
            let d = k.l1_distance(key);
            // Strict improvement keeps the first (smallest) key among ties.
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
        match best {
            Some((_, c)) => c.present as f64 / c.total as f64,
            None => self.fallback_density(),
        }
    }

    /// Adds the contribution of pair `s` as it appears in `g`.
    pub fn add_pair(&mut self, g: &Graph, s: VertexPair) {
        let key = change_statistics(g, s, self.selection);
        let present = u64::from(g.has_edge_at(s));
        let c = self.entries.entry(key).or_default();
        c.total += 1;
        c.present += present;
        self.pair_total += 1;
        self.edge_total += present;
    }

    /// Removes the contribution of pair `s` as it appears in `g`. Keys that
    /// drop to zero total are deleted so nearest-key lookups never see them.
    pub fn remove_pair(&mut self, g: &Graph, s: VertexPair) {
        let key = change_statistics(g, s, self.selection);
        let present = u64::from(g.has_edge_at(s));
        let c = self.entries.get_mut(&key).expect("removing a pair that was never added");
        c.total -= 1;
        c.present -= present;
        if c.total == 0 {
            self.entries.remove(&key);
        }
        self.pair_total -= 1;
        self.edge_total -= present;
    }

    /// Incrementally updates the table for a flip at `s`, so that it equals
    /// `estimate_table` of the post-flip graph. Only pairs incident to an
    /// endpoint of `s` can change their key or indicator under the E/S2/T
    /// statistics.
    pub fn update_after_flip(&mut self, before: &Graph, s: VertexPair) {
        let affected = affected_pairs(s, before.n());
        for &p in &affected {
            self.remove_pair(before, p);
        }
        let after = before.flipped(s);
        for &p in &affected {
            self.add_pair(&after, p);
        }
    }

    /// CSV dump: one row per key with columns `delta_<stat>..., n_u, N_u, qhat`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for name in self.selection.names() {
            let _ = write!(out, "delta_{name},");
        }
        out.push_str("n_u,N_u,qhat\n");
        for (key, c) in &self.entries {
            for v in key.values() {
                let _ = write!(out, "{v},");
            }
            let qhat = c.present as f64 / c.total as f64;
            let _ = writeln!(out, "{},{},{}", c.present, c.total, crate::util::fmt_sig(qhat, 6));
        }
        out
    }
}

impl ConditionalModel for ConditionalTable {
    fn selection(&self) -> StatSelection {
        self.selection
    }

    fn edge_probability(&self, delta: &ChangeStats) -> f64 {
        self.lookup(delta)
    }
}

/// All vertex pairs sharing an endpoint with `s`, including `s` itself.
/// These are exactly the pairs whose change statistics can move when the
/// indicator at `s` flips.
pub fn affected_pairs(s: VertexPair, n: usize) -> Vec<VertexPair> {
    let (i, j) = (s.i(), s.j());
    let mut out = Vec::with_capacity(2 * n - 3);
    for v in 0..n {
        if v != i && v != j {
            out.push(VertexPair::new(i.min(v), i.max(v), n).expect("valid"));
            out.push(VertexPair::new(j.min(v), j.max(v), n).expect("valid"));
        }
    }
    out.push(s);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergm::{sample_exact, ErgmSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complete_and_empty_graphs_edges_only() {
        let k4 = Graph::complete(4).unwrap();
        let t = ConditionalTable::from_graph(&k4, StatSelection::EDGES).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.lookup(&ChangeStats::new(&[1])), 1.0);
        assert_eq!(t.counts(&ChangeStats::new(&[1])).unwrap(), KeyCounts { present: 6, total: 6 });

        let empty = Graph::empty(4).unwrap();
        let t = ConditionalTable::from_graph(&empty, StatSelection::EDGES).unwrap();
        assert_eq!(t.lookup(&ChangeStats::new(&[1])), 0.0);
        assert_eq!(t.fallback_density(), 0.0);
    }

    #[test]
    fn path_graph_keys() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = ConditionalTable::from_graph(&path, StatSelection::EDGES_TWO_STARS).unwrap();
        assert_eq!(t.lookup(&ChangeStats::new(&[1, 2])), 0.0);
        assert_eq!(t.lookup(&ChangeStats::new(&[1, 1])), 1.0);
        assert_eq!(t.counts(&ChangeStats::new(&[1, 1])).unwrap(), KeyCounts { present: 2, total: 2 });
        assert_eq!(t.counts(&ChangeStats::new(&[1, 2])).unwrap(), KeyCounts { present: 0, total: 1 });
    }

    #[test]
    fn empty_graph_list_is_rejected() {
        assert!(estimate_table(&[], StatSelection::EDGES).is_err());
        let a = Graph::empty(4).unwrap();
        let b = Graph::empty(5).unwrap();
        assert!(estimate_table(&[&a, &b], StatSelection::EDGES).is_err());
    }

    #[test]
    fn nearest_key_lookup() {
        // Two observed keys (1,0) -> 0.1 and (1,4) -> 0.9; query (1,1)
        // resolves to the closer key (1,0).
        let mut t = ConditionalTable {
            selection: StatSelection::EDGES_TWO_STARS,
            entries: BTreeMap::new(),
            edge_total: 10,
            pair_total: 20,
        };
        t.entries.insert(ChangeStats::new(&[1, 0]), KeyCounts { present: 1, total: 10 });
        t.entries.insert(ChangeStats::new(&[1, 4]), KeyCounts { present: 9, total: 10 });
        assert_eq!(t.lookup(&ChangeStats::new(&[1, 1])), 0.1);
        assert_eq!(t.lookup(&ChangeStats::new(&[1, 3])), 0.9);
        // Equidistant query (1,2): tie broken toward the smaller key.
        assert_eq!(t.lookup(&ChangeStats::new(&[1, 2])), 0.1);
    }

    #[test]
    fn single_observed_key_answers_everything() {
        let k4 = Graph::complete(4).unwrap();
        let t = ConditionalTable::from_graph(&k4, StatSelection::ALL).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.lookup(&ChangeStats::new(&[1, 0, 0])), 1.0);
    }

    #[test]
    fn lookup_from_er_sample_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = Graph::bernoulli(40, 0.2, &mut rng).unwrap();
        let t = ConditionalTable::from_graph(&g, StatSelection::EDGES_TWO_STARS).unwrap();
        // Recount one key by brute force.
        for s in g.pairs() {
            let key = change_statistics(&g, s, StatSelection::EDGES_TWO_STARS);
            let mut present = 0u64;
            let mut total = 0u64;
            for p in g.pairs() {
                if change_statistics(&g, p, StatSelection::EDGES_TWO_STARS) == key {
                    total += 1;
                    present += u64::from(g.has_edge_at(p));
                }
            }
            let q = t.lookup(&key);
            assert!((q - present as f64 / total as f64).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&q));
        }
        assert_eq!(t.edge_total(), g.edge_count() as u64);
        assert_eq!(t.pair_total(), g.pair_count() as u64);
    }

    #[test]
    fn incremental_update_matches_full_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for case in 0..200 {
            let n = rng.random_range(4..=20usize);
            let g = Graph::bernoulli(n, rng.random_range(0.1..0.9), &mut rng).unwrap();
            let sel = match case % 4 {
                0 => StatSelection::EDGES,
                1 => StatSelection::EDGES_TWO_STARS,
                2 => StatSelection::EDGES_TRIANGLES,
                _ => StatSelection::ALL,
            };
            let s = VertexPair::from_index(rng.random_range(0..g.pair_count()), n).unwrap();

            let mut incremental = ConditionalTable::from_graph(&g, sel).unwrap();
            incremental.update_after_flip(&g, s);
            let oracle = ConditionalTable::from_graph(&g.flipped(s), sel).unwrap();
            assert_eq!(incremental, oracle, "case {case}, n={n}");
        }
    }

    #[test]
    fn flip_twice_restores_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Graph::bernoulli(12, 0.4, &mut rng).unwrap();
        let original = ConditionalTable::from_graph(&g, StatSelection::ALL).unwrap();
        let s = VertexPair::new(2, 7, 12).unwrap();
        let mut t = original.clone();
        t.update_after_flip(&g, s);
        t.update_after_flip(&g.flipped(s), s);
        assert_eq!(t, original);
    }

    #[test]
    fn edges_only_flip_changes_single_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = Graph::bernoulli(10, 0.5, &mut rng).unwrap();
        let t0 = ConditionalTable::from_graph(&g, StatSelection::EDGES).unwrap();
        let s = VertexPair::new(0, 1, 10).unwrap();
        let mut t1 = t0.clone();
        t1.update_after_flip(&g, s);
        let key = ChangeStats::new(&[1]);
        let before = t0.counts(&key).unwrap();
        let after = t1.counts(&key).unwrap();
        assert_eq!(before.total, after.total);
        assert_eq!(
            after.present as i64 - before.present as i64,
            if g.has_edge_at(s) { -1 } else { 1 }
        );
    }

    #[test]
    fn relabeling_the_input_leaves_the_table_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = Graph::bernoulli(14, 0.3, &mut rng).unwrap();
        let mut perm: Vec<usize> = (0..14).collect();
        // Fisher-Yates with the test RNG.
        for i in (1..14usize).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let h = g.relabeled(&perm).unwrap();
        let tg = ConditionalTable::from_graph(&g, StatSelection::ALL).unwrap();
        let th = ConditionalTable::from_graph(&h, StatSelection::ALL).unwrap();
        assert_eq!(tg, th);
    }

    #[test]
    fn multi_graph_estimation_pools_counts() {
        let k4 = Graph::complete(4).unwrap();
        let empty = Graph::empty(4).unwrap();
        let t = estimate_table(&[&k4, &empty], StatSelection::EDGES).unwrap();
        assert_eq!(t.pair_total(), 12);
        assert_eq!(t.lookup(&ChangeStats::new(&[1])), 0.5);
        assert!((t.fallback_density() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn consistency_smoke_on_er_samples() {
        // Small-scale version of the estimator consistency check; the full
        // n=100, 50-replicate run lives in the acceptance suite.
        let spec = ErgmSpec::erdos_renyi(60, -2.0).unwrap();
        let steps = crate::ergm::default_steps(60).unwrap();
        let mut err_acc = 0.0;
        let reps = 10;
        for seed in 0..reps {
            let g = sample_exact(&spec, steps, 100 + seed, None).unwrap();
            let t = ConditionalTable::from_graph(&g, StatSelection::EDGES).unwrap();
            err_acc += (t.lookup(&ChangeStats::new(&[1])) - 0.1192).abs();
        }
        assert!(err_acc / (reps as f64) < 0.02);
    }

    #[test]
    fn csv_dump_format() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = ConditionalTable::from_graph(&path, StatSelection::EDGES_TWO_STARS).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "delta_edges,delta_two_stars,n_u,N_u,qhat");
        assert_eq!(lines.next().unwrap(), "1,1,2,2,1.00000");
        assert_eq!(lines.next().unwrap(), "1,2,0,1,0");
        assert!(lines.next().is_none());
    }

    #[test]
    fn affected_pairs_covers_all_key_movement() {
        // Any pair not incident to the flipped edge keeps both its key and
        // its indicator; verified exhaustively on a random graph.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let g = Graph::bernoulli(12, 0.5, &mut rng).unwrap();
        let s = VertexPair::new(3, 8, 12).unwrap();
        let flipped = g.flipped(s);
        let affected = affected_pairs(s, 12);
        for p in g.pairs() {
            if affected.contains(&p) {
                continue;
            }
            assert_eq!(
                change_statistics(&g, p, StatSelection::ALL),
                change_statistics(&flipped, p, StatSelection::ALL)
            );
            assert_eq!(g.has_edge_at(p), flipped.has_edge_at(p));
        }
    }
}
