//! Subgraph statistics (edges, 2-stars, triangles), their selection, and the
//! per-pair change statistics that drive conditional edge probabilities.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPair};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A raw subgraph count. `Edges` is E, `TwoStars` is S2 = Σ_v C(deg v, 2),
/// `Triangles` is T, the number of vertex triples with all three edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Edges,
    TwoStars,
    Triangles,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Edges => "edges",
            Statistic::TwoStars => "two_stars",
            Statistic::Triangles => "triangles",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "edges" | "e" => Ok(Statistic::Edges),
            "two_stars" | "2stars" | "s2" => Ok(Statistic::TwoStars),
            "triangles" | "t" => Ok(Statistic::Triangles),
            other => Err(Error::InvalidConfig(format!("unknown statistic {other:?}"))),
        }
    }

    /// Number of edges of the counted subgraph (1, 2 or 3).
    pub fn subgraph_edges(&self) -> u32 {
        match self {
            Statistic::Edges => 1,
            Statistic::TwoStars => 2,
            Statistic::Triangles => 3,
        }
    }
}

impl Serialize for Statistic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Statistic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Statistic::from_name(&name).map_err(D::Error::custom)
    }
}

/// A non-empty subset of {edges, two-stars, triangles}, always kept in that
/// canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StatSelection {
    edges: bool,
    two_stars: bool,
    triangles: bool,
}

impl StatSelection {
    pub const EDGES: Self = Self { edges: true, two_stars: false, triangles: false };
    pub const EDGES_TWO_STARS: Self = Self { edges: true, two_stars: true, triangles: false };
    pub const EDGES_TRIANGLES: Self = Self { edges: true, two_stars: false, triangles: true };
    pub const ALL: Self = Self { edges: true, two_stars: true, triangles: true };

    pub fn new(stats: &[Statistic]) -> Result<Self> {
        if stats.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut sel = Self { edges: false, two_stars: false, triangles: false };
        for s in stats {
            match s {
                Statistic::Edges => sel.edges = true,
                Statistic::TwoStars => sel.two_stars = true,
                Statistic::Triangles => sel.triangles = true,
            }
        }
        Ok(sel)
    }

    /// Parses a comma-separated list such as `edges,two_stars`.
    pub fn parse(list: &str) -> Result<Self> {
        let stats: Vec<Statistic> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Statistic::from_name)
            .collect::<Result<_>>()?;
        Self::new(&stats)
    }

    pub fn contains(&self, s: Statistic) -> bool {
        match s {
            Statistic::Edges => self.edges,
            Statistic::TwoStars => self.two_stars,
            Statistic::Triangles => self.triangles,
        }
    }

    pub fn len(&self) -> usize {
        usize::from(self.edges) + usize::from(self.two_stars) + usize::from(self.triangles)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Selected statistics in canonical (E, S2, T) order.
    pub fn iter(&self) -> impl Iterator<Item = Statistic> + '_ {
        [Statistic::Edges, Statistic::TwoStars, Statistic::Triangles]
            .into_iter()
            .filter(|s| self.contains(*s))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.iter().map(|s| s.name()).collect()
    }
}

impl Serialize for StatSelection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Statistic> = self.iter().collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StatSelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Statistic>::deserialize(d)?;
        StatSelection::new(&v).map_err(D::Error::custom)
    }
}

/// Change statistics Δ_s t(x) = t(x with edge s) − t(x without edge s),
/// one non-negative component per selected statistic in (E, S2, T) order.
///
/// Independent of whether edge s is present in x. ΔE is always 1 when the
/// edge statistic is selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChangeStats {
    len: u8,
    values: [u32; 3],
}

impl ChangeStats {
    pub fn new(values: &[u32]) -> Self {
        assert!(!values.is_empty() && values.len() <= 3, "1 to 3 components");
        let mut buf = [0u32; 3];
        buf[..values.len()].copy_from_slice(values);
        Self { len: values.len() as u8, values: buf }
    }

    pub fn values(&self) -> &[u32] {
        &self.values[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inner product with a coefficient vector of matching length.
    pub fn dot(&self, beta: &[f64]) -> f64 {
        debug_assert_eq!(beta.len(), self.len());
        self.values().iter().zip(beta).map(|(&v, &b)| f64::from(v) * b).sum()
    }

    /// L1 distance between two keys of the same arity.
    pub fn l1_distance(&self, other: &ChangeStats) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.values()
            .iter()
            .zip(other.values())
            .map(|(&a, &b)| u64::from(a.abs_diff(b)))
            .sum()
    }
}

/// Raw counts of the selected statistics, in canonical order.
pub fn count_statistics(g: &Graph, sel: StatSelection) -> Vec<u64> {
    let mut out = Vec::with_capacity(sel.len());
    for s in sel.iter() {
        out.push(match s {
            Statistic::Edges => g.edge_count() as u64,
            Statistic::TwoStars => {
                g.degrees().iter().map(|&d| u64::from(d) * u64::from(d.saturating_sub(1)) / 2).sum()
            }
            Statistic::Triangles => {
                // Each triangle is seen once per edge.
                let mut acc: u64 = 0;
                for (i, j) in g.edge_list() {
                    acc += u64::from(g.common_neighbors(i, j));
                }
                acc / 3
            }
        });
    }
    out
}

/// Change statistics at `s`. ΔE = 1; ΔS2 = deg(i) + deg(j) not counting the
/// edge s itself; ΔT = |N(i) ∩ N(j)|.
pub fn change_statistics(g: &Graph, s: VertexPair, sel: StatSelection) -> ChangeStats {
    let present = u32::from(g.has_edge_at(s));
    let mut values = [0u32; 3];
    let mut len = 0usize;
    for stat in sel.iter() {
        values[len] = match stat {
            Statistic::Edges => 1,
            Statistic::TwoStars => g.degree(s.i()) - present + g.degree(s.j()) - present,
            Statistic::Triangles => g.common_neighbors(s.i(), s.j()),
        };
        len += 1;
    }
    ChangeStats { len: len as u8, values }
}
