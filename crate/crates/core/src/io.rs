//! Text formats for clusterings and ground truth.
//!
//! * Assignment TSV: `vertex \t cluster` per line. Also used for generator
//!   labels.
//! * Cluster lines: one cluster per line, whitespace-separated vertex ids.
//!   Written clusterings put the attractor first; ground-truth community
//!   files (SNAP style) use the same syntax.
//!
//! Ids in files are original ids and are translated through an [`IdMap`].

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::cluster::{Cluster, Clustering};
use crate::error::{Error, Result};
use crate::graph::{IdMap, VertexId};
use crate::metrics::GroundTruth;

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(e.into())),
            Ok(line) => {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, t.to_string())))
                }
            }
        })
}

fn parse_id(lineno: usize, tok: &str) -> Result<u64> {
    tok.parse()
        .map_err(|_| Error::parse(lineno, format!("invalid id {tok:?}")))
}

/// Reads `vertex cluster` pairs (tab or space separated).
pub fn read_assignment<R: BufRead>(reader: R) -> Result<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for item in content_lines(reader) {
        let (lineno, line) = item?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(lineno, "expected `vertex cluster`"));
        }
        out.push((parse_id(lineno, toks[0])?, parse_id(lineno, toks[1])?));
    }
    Ok(out)
}

/// Reads one id list per line.
pub fn read_cluster_lines<R: BufRead>(reader: R) -> Result<Vec<Vec<u64>>> {
    content_lines(reader)
        .map(|item| {
            let (lineno, line) = item?;
            line.split_whitespace()
                .map(|tok| parse_id(lineno, tok))
                .collect()
        })
        .collect()
}

/// Writes `original_id \t cluster_index` for every assigned vertex, in
/// compact vertex order.
pub fn write_assignment<W: Write>(clustering: &Clustering, ids: &IdMap, mut out: W) -> Result<()> {
    for (i, c) in clustering.assignment().iter().enumerate() {
        if let Some(c) = c {
            writeln!(out, "{}\t{}", ids.original(VertexId::from(i)), c)?;
        }
    }
    Ok(())
}

/// Writes one cluster per line, attractor first, then the other members in
/// ascending compact order.
pub fn write_cluster_lines<W: Write>(
    clustering: &Clustering,
    ids: &IdMap,
    mut out: W,
) -> Result<()> {
    for c in clustering.clusters() {
        let mut line: Vec<String> = Vec::with_capacity(c.members.len());
        if let Some(a) = c.attractor {
            line.push(ids.original(a).to_string());
        }
        line.extend(
            c.members
                .iter()
                .filter(|&&v| Some(v) != c.attractor)
                .map(|&v| ids.original(v).to_string()),
        );
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

fn lookup(ids: &IdMap, id: u64) -> Result<VertexId> {
    ids.compact(id)
        .ok_or_else(|| Error::param(format!("vertex id {id} is not in the graph")))
}

/// Clustering from assignment pairs; unknown ids are an error.
pub fn clustering_from_assignment(ids: &IdMap, pairs: &[(u64, u64)]) -> Result<Clustering> {
    let mut labels: Vec<Option<u64>> = vec![None; ids.len()];
    for &(v, c) in pairs {
        let slot = &mut labels[lookup(ids, v)?.index()];
        if slot.is_some_and(|prev| prev != c) {
            return Err(Error::param(format!("vertex {v} is assigned twice")));
        }
        *slot = Some(c);
    }
    Ok(Clustering::from_labels(&labels))
}

/// Clustering from cluster lines; the first id of each line is recorded as
/// its attractor. Unknown ids and repeated vertices are an error.
pub fn clustering_from_lines(ids: &IdMap, lines: &[Vec<u64>]) -> Result<Clustering> {
    let mut seen = vec![false; ids.len()];
    let mut clusters = Vec::with_capacity(lines.len());
    for line in lines.iter().filter(|l| !l.is_empty()) {
        let mut members = Vec::with_capacity(line.len());
        for &id in line {
            let v = lookup(ids, id)?;
            if std::mem::replace(&mut seen[v.index()], true) {
                return Err(Error::param(format!("vertex {id} appears in two clusters")));
            }
            members.push(v);
        }
        clusters.push(Cluster {
            attractor: members.first().copied(),
            members,
        });
    }
    Ok(Clustering::from_clusters(ids.len(), clusters))
}

/// Ground truth from community lines; ids outside `ids` are skipped with a
/// warning, communities left empty are dropped.
pub fn truth_from_lines(ids: &IdMap, lines: &[Vec<u64>]) -> Result<GroundTruth> {
    let mut unknown = 0;
    let communities: Vec<Vec<VertexId>> = lines
        .iter()
        .map(|line| {
            line.iter()
                .filter_map(|&id| {
                    let v = ids.compact(id);
                    if v.is_none() {
                        unknown += 1;
                    }
                    v
                })
                .collect::<Vec<_>>()
        })
        .filter(|c| !c.is_empty())
        .collect();
    if unknown > 0 {
        log::warn!("ground truth names {unknown} vertex id(s) missing from the graph; skipped");
    }
    GroundTruth::from_communities(ids.len(), communities)
}

/// Non-overlapping ground truth from `vertex cluster` pairs; ids outside
/// `ids` are skipped with a warning.
pub fn truth_from_assignment(ids: &IdMap, pairs: &[(u64, u64)]) -> Result<GroundTruth> {
    let mut groups: BTreeMap<u64, Vec<VertexId>> = BTreeMap::new();
    let mut unknown = 0;
    for &(v, c) in pairs {
        match ids.compact(v) {
            Some(v) => groups.entry(c).or_default().push(v),
            None => unknown += 1,
        }
    }
    if unknown > 0 {
        log::warn!("ground truth names {unknown} vertex id(s) missing from the graph; skipped");
    }
    GroundTruth::from_communities(ids.len(), groups.into_values().collect())
}
