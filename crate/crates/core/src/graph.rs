//! Undirected simple graphs in compressed adjacency form.
//!
//! A [`Graph`] is immutable once built. The random-walk transition operator
//! `P = (I + A)(I + D)^-1` is never materialized; [`Graph::transition_column`]
//! produces one column on demand from the adjacency lists.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Index of a vertex in a [`Graph`], in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl From<usize> for VertexId {
    fn from(v: usize) -> Self {
        VertexId(u32::try_from(v).expect("vertex index exceeds u32"))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected, unweighted graph without self-loops or parallel edges.
///
/// Neighbor lists are sorted ascending and symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge iterator.
    ///
    /// Self-loops are dropped and duplicate edges, in either orientation,
    /// collapse to one. Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut lists: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "edge ({u}, {v}) out of range for {n} vertices"
            );
            if u == v {
                continue;
            }
            lists[u as usize].push(VertexId(v));
            lists[v as usize].push(VertexId(u));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        let edge_count = neighbors.len() / 2;
        Graph {
            offsets,
            neighbors,
            edge_count,
        }
    }

    pub fn empty() -> Self {
        Graph::from_edges(0, std::iter::empty())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId::from)
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let i = v.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// Column `j` of `P = (I + A)(I + D)^-1`, sorted by vertex.
    ///
    /// Every entry equals `1 / (1 + deg(j))`; the column covers `j` and its
    /// neighbors.
    pub fn transition_column(&self, j: VertexId) -> Vec<(VertexId, f64)> {
        let nbrs = self.neighbors(j);
        let w = 1.0 / (1 + nbrs.len()) as f64;
        let mut col = Vec::with_capacity(nbrs.len() + 1);
        let split = nbrs.partition_point(|&v| v < j);
        col.extend(nbrs[..split].iter().map(|&v| (v, w)));
        col.push((j, w));
        col.extend(nbrs[split..].iter().map(|&v| (v, w)));
        col
    }
}

/// Mapping between original (file) vertex ids and compact indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<u64>,
    compact: HashMap<u64, VertexId>,
}

impl IdMap {
    /// Identity mapping on `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut map = IdMap::default();
        for i in 0..n as u64 {
            map.insert(i);
        }
        map
    }

    /// Compact index of `id`, assigning the next free index on first sight.
    pub fn insert(&mut self, id: u64) -> VertexId {
        let next = VertexId::from(self.original.len());
        *self.compact.entry(id).or_insert_with(|| {
            self.original.push(id);
            next
        })
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    #[inline]
    pub fn original(&self, v: VertexId) -> u64 {
        self.original[v.index()]
    }

    pub fn compact(&self, id: u64) -> Option<VertexId> {
        self.compact.get(&id).copied()
    }

    /// Two-column TSV: `original \t compact`.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, id) in self.original.iter().enumerate() {
            writeln!(out, "{id}\t{i}")?;
        }
        Ok(())
    }
}

/// A graph read from an edge-list file together with its id table.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: IdMap,
    /// Number of `u u` lines that were dropped.
    pub self_loops: usize,
}

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` are comments, blank lines are skipped. Vertex ids
/// are arbitrary non-negative 64-bit integers and are compacted to `[0, n)` in
/// order of first appearance. Lines with more than two tokens are rejected
/// (weighted input), as is a SNAP `# Directed graph` header.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut ids = IdMap::default();
    let mut edges = Vec::new();
    let mut self_loops = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if comment
                .trim_start()
                .to_ascii_lowercase()
                .starts_with("directed")
            {
                return Err(Error::Unsupported(format!(
                    "line {lineno}: directed graphs are not supported"
                )));
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::parse(lineno, "expected two vertex ids")),
        };
        if tokens.next().is_some() {
            return Err(Error::Unsupported(format!(
                "line {lineno}: weighted or attributed edges are not supported"
            )));
        }
        let parse = |tok: &str| {
            tok.parse::<u64>()
                .map_err(|_| Error::parse(lineno, format!("invalid vertex id {tok:?}")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let u = ids.insert(a);
        let v = ids.insert(b);
        if u == v {
            self_loops += 1;
            continue;
        }
        edges.push((u.0, v.0));
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop line(s)");
    }
    let graph = Graph::from_edges(ids.len(), edges);
    Ok(LoadedGraph {
        graph,
        ids,
        self_loops,
    })
}

/// Writes each undirected edge once as `u v` using original ids.
pub fn write_edge_list<W: Write>(graph: &Graph, ids: &IdMap, mut out: W) -> Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{} {}", ids.original(u), ids.original(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> LoadedGraph {
        load_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn empty_input() {
        let g = load("").graph;
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn dedup_and_self_loop() {
        let l = load("0 1\n1 0\n1 1\n");
        assert_eq!(l.graph.vertex_count(), 2);
        assert_eq!(l.graph.edge_count(), 1);
        assert_eq!(l.self_loops, 1);
        assert_eq!(l.graph.degree(VertexId(0)), 1);
        assert_eq!(l.graph.degree(VertexId(1)), 1);
    }

    #[test]
    fn sparse_ids_are_compacted_in_first_appearance_order() {
        let l = load("# comment\n900 17\n\n17 123456789012\n");
        assert_eq!(l.graph.vertex_count(), 3);
        assert_eq!(l.ids.original(VertexId(0)), 900);
        assert_eq!(l.ids.original(VertexId(1)), 17);
        assert_eq!(l.ids.compact(123456789012), Some(VertexId(2)));
        let mut tsv = Vec::new();
        l.ids.write_tsv(&mut tsv).unwrap();
        assert_eq!(
            String::from_utf8(tsv).unwrap(),
            "900\t0\n17\t1\n123456789012\t2\n"
        );
    }

    #[test]
    fn parse_error_reports_line() {
        match load_edge_list("0 1\n2 x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_edge_list("5\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_edge_list("1 -2\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn weighted_and_directed_are_rejected() {
        assert!(matches!(
            load_edge_list("0 1 0.5\n".as_bytes()),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            load_edge_list("# Directed graph (each unordered pair...)\n0 1\n".as_bytes()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn degrees() {
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert!(k3.vertices().all(|v| k3.degree(v) == 2));
        let path = Graph::from_edges(2, [(0, 1)]);
        assert_eq!(path.degree(VertexId(0)), 1);
    }

    #[test]
    fn transition_columns() {
        let g = Graph::from_edges(3, [(0, 1)]);
        assert_eq!(g.transition_column(VertexId(2)), vec![(VertexId(2), 1.0)]);
        assert_eq!(
            g.transition_column(VertexId(0)),
            vec![(VertexId(0), 0.5), (VertexId(1), 0.5)]
        );
        let star = Graph::from_edges(5, [(2, 0), (2, 1), (2, 3), (2, 4)]);
        let col = star.transition_column(VertexId(2));
        assert_eq!(col.len(), 5);
        for (i, (v, p)) in col.iter().enumerate() {
            assert_eq!(v.index(), i);
            assert!((p - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    #[should_panic]
    fn degree_out_of_range_panics() {
        let g = Graph::from_edges(2, [(0, 1)]);
        g.degree(VertexId(2));
    }
}
