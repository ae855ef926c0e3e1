//! Edge-list text format.
//!
//! One `u v` pair per line, 0-indexed, whitespace-separated, in either
//! order. Lines starting with `#` are comments. An optional header line
//! `n <count>` pins the vertex count; without it the count is inferred as
//! max index + 1 (or an explicit count can be supplied).

use crate::error::{Error, Result};
use crate::graph::Graph;
use std::io::{BufRead, Write};
use std::path::Path;

/// How the vertex count is determined when reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexCountMode {
    /// Use the `n <count>` header when present, otherwise max index + 1.
    HeaderOrInfer,
    /// Require the `n <count>` header.
    HeaderRequired,
    /// Ignore any header value in favour of this count (indices are still
    /// validated against it).
    Explicit(usize),
}

pub fn read_edge_list<R: BufRead>(reader: R, mode: VertexCountMode) -> Result<Graph> {
    let mut header_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut max_index = 0usize;
    let mut saw_vertex = false;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let first = fields.next().expect("non-empty line has a field");
        if first == "n" {
            if header_n.is_some() || saw_vertex {
                return Err(Error::EdgeListParse {
                    line: lineno,
                    message: "header `n <count>` must appear once, before any edge".into(),
                });
            }
            let count = fields
                .next()
                .ok_or_else(|| Error::EdgeListParse { line: lineno, message: "header needs a count".into() })?
                .parse::<usize>()
                .map_err(|e| Error::EdgeListParse { line: lineno, message: format!("bad count: {e}") })?;
            header_n = Some(count);
            continue;
        }
        let u = first
            .parse::<usize>()
            .map_err(|e| Error::EdgeListParse { line: lineno, message: format!("bad vertex {first:?}: {e}") })?;
        let v_str = fields
            .next()
            .ok_or_else(|| Error::EdgeListParse { line: lineno, message: "expected `u v`".into() })?;
        let v = v_str
            .parse::<usize>()
            .map_err(|e| Error::EdgeListParse { line: lineno, message: format!("bad vertex {v_str:?}: {e}") })?;
        if fields.next().is_some() {
            return Err(Error::EdgeListParse { line: lineno, message: "expected exactly two vertices".into() });
        }
        if u == v {
            return Err(Error::EdgeListParse { line: lineno, message: format!("self-loop at vertex {u}") });
        }
        saw_vertex = true;
        max_index = max_index.max(u).max(v);
        edges.push((u, v));
    }

    let n = match mode {
        VertexCountMode::Explicit(n) => n,
        VertexCountMode::HeaderRequired => header_n.ok_or(Error::EdgeListParse {
            line: 0,
            message: "missing required header line `n <count>`".into(),
        })?,
        VertexCountMode::HeaderOrInfer => match header_n {
            Some(n) => n,
            None => {
                if edges.is_empty() {
                    return Err(Error::EmptyInput("edge list has no edges and no `n` header"));
                }
                max_index + 1
            }
        },
    };
    if saw_vertex && max_index >= n {
        return Err(Error::EdgeListParse {
            line: 0,
            message: format!("vertex index {max_index} out of range for n={n}"),
        });
    }
    Graph::from_edges(n, &edges)
}

pub fn read_edge_list_path<P: AsRef<Path>>(path: P, mode: VertexCountMode) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    read_edge_list(std::io::BufReader::new(file), mode)
}

/// Writes the graph with an `n <count>` header and edges in canonical
/// order, so equal graphs serialize to identical bytes.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "n {}", g.n())?;
    for (i, j) in g.edge_list() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

pub fn write_edge_list_path<P: AsRef<Path>>(g: &Graph, path: P) -> Result<()> {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Round-trip helper used by tests and the CLI.
pub fn edge_list_string(g: &Graph) -> String {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).expect("write to Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Cursor;

    fn parse(text: &str, mode: VertexCountMode) -> Result<Graph> {
        read_edge_list(Cursor::new(text), mode)
    }

    #[test]
    fn reads_plain_edge_lists() {
        let g = parse("0 1\n1 2\n", VertexCountMode::HeaderOrInfer).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_list(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn header_comments_and_unordered_pairs() {
        let text = "# a comment\nn 5\n\n2 0\n# another\n4 3\n";
        let g = parse(text, VertexCountMode::HeaderOrInfer).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_list(), vec![(0, 2), (3, 4)]);
    }

    #[test]
    fn header_modes() {
        assert!(parse("0 1\n", VertexCountMode::HeaderRequired).is_err());
        let g = parse("0 1\n", VertexCountMode::Explicit(10)).unwrap();
        assert_eq!(g.n(), 10);
        // Out-of-range index against the pinned count.
        assert!(parse("0 11\n", VertexCountMode::Explicit(10)).is_err());
        assert!(parse("n 3\n0 5\n", VertexCountMode::HeaderOrInfer).is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse("0\n", VertexCountMode::HeaderOrInfer).is_err());
        assert!(parse("0 1 2\n", VertexCountMode::HeaderOrInfer).is_err());
        assert!(parse("a b\n", VertexCountMode::HeaderOrInfer).is_err());
        assert!(parse("3 3\n", VertexCountMode::HeaderOrInfer).is_err());
        assert!(parse("0 1\nn 5\n", VertexCountMode::HeaderOrInfer).is_err());
        assert!(parse("", VertexCountMode::HeaderOrInfer).is_err());
        // Header-only empty graph is fine.
        let g = parse("n 4\n", VertexCountMode::HeaderOrInfer).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicate_edges_are_idempotent() {
        let g = parse("0 1\n1 0\n0 1\n", VertexCountMode::HeaderOrInfer).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn write_read_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let g = Graph::bernoulli(25, 0.2, &mut rng).unwrap();
            let text = edge_list_string(&g);
            let back = parse(&text, VertexCountMode::HeaderOrInfer).unwrap();
            assert_eq!(g, back);
            // Deterministic bytes.
            assert_eq!(text, edge_list_string(&back));
        }
    }
}
