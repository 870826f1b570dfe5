//! Clustering quality measures: NMI, conductance, Jaccard index and a
//! pair-sampled Rand index.

use std::collections::{BTreeSet, HashSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng as _;

use crate::cluster::Clustering;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng;

/// Above this many candidate pairs the Rand index samples by rejection
/// instead of enumerating.
const ENUMERATION_LIMIT: usize = 2_000_000;

/// Reference communities, possibly overlapping and possibly covering only a
/// subset of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    communities: Vec<Vec<VertexId>>,
    membership: Vec<Vec<usize>>,
}

impl GroundTruth {
    /// Communities over vertices `0..n`. Members are deduplicated; empty
    /// communities are an error.
    pub fn from_communities(n: usize, communities: Vec<Vec<VertexId>>) -> Result<Self> {
        let mut membership = vec![Vec::new(); n];
        let mut cleaned = Vec::with_capacity(communities.len());
        for (ci, mut members) in communities.into_iter().enumerate() {
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                return Err(Error::param(format!("community {ci} is empty")));
            }
            for &v in &members {
                let slot = membership.get_mut(v.index()).ok_or_else(|| {
                    Error::param(format!("community {ci} names vertex {v} outside 0..{n}"))
                })?;
                slot.push(ci);
            }
            cleaned.push(members);
        }
        Ok(GroundTruth {
            communities: cleaned,
            membership,
        })
    }

    /// Non-overlapping truth from one label per vertex.
    pub fn from_labels(labels: &[usize]) -> Self {
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        let mut communities = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            communities[l].push(VertexId::from(v));
        }
        communities.retain(|c| !c.is_empty());
        GroundTruth::from_communities(labels.len(), communities).expect("labels are in range")
    }

    pub fn communities(&self) -> &[Vec<VertexId>] {
        &self.communities
    }

    pub fn memberships(&self, v: VertexId) -> &[usize] {
        self.membership.get(v.index()).map_or(&[], Vec::as_slice)
    }

    pub fn vertex_count(&self) -> usize {
        self.membership.len()
    }

    fn share_community(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = (self.memberships(u), self.memberships(v));
        a.iter().any(|c| b.contains(c))
    }
}

/// Vertices that have both a predicted cluster and at least one community.
fn evaluated(pred: &Clustering, truth: &GroundTruth) -> Vec<VertexId> {
    let n = pred.vertex_count().min(truth.vertex_count());
    let mut skipped = 0;
    let out = (0..n)
        .map(VertexId::from)
        .filter(|&v| {
            let has_truth = !truth.memberships(v).is_empty();
            let has_pred = pred.cluster_of(v).is_some();
            if has_truth && !has_pred {
                skipped += 1;
            }
            has_truth && has_pred
        })
        .collect();
    if skipped > 0 {
        log::warn!("{skipped} ground-truth vertices have no predicted cluster and are ignored");
    }
    out
}

/// Predicted clusters (rows) against ground-truth communities (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    total: u64,
}

impl ConfusionMatrix {
    /// Counts over the vertices present in both `pred` and `truth`. A vertex
    /// in several communities is counted in each of their columns; the total
    /// stays the number of distinct vertices.
    pub fn new(pred: &Clustering, truth: &GroundTruth) -> Self {
        let vertices = evaluated(pred, truth);
        let mut row_of = vec![usize::MAX; pred.len()];
        let mut counts: Vec<Vec<u64>> = Vec::new();
        for &v in &vertices {
            let c = pred.cluster_of(v).expect("evaluated vertices are assigned");
            if row_of[c] == usize::MAX {
                row_of[c] = counts.len();
                counts.push(vec![0; truth.communities.len()]);
            }
            for &j in truth.memberships(v) {
                counts[row_of[c]][j] += 1;
            }
        }
        ConfusionMatrix {
            counts,
            total: vertices.len() as u64,
        }
    }

    /// From explicit counts; `total` is the number of evaluated vertices.
    pub fn from_counts(counts: Vec<Vec<u64>>, total: u64) -> Self {
        ConfusionMatrix { counts, total }
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let cols = self.counts.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// Normalized mutual information, natural log, `0 log 0 = 0`.
    ///
    /// Returns 0 with a warning when the denominator vanishes (both sides a
    /// single cluster).
    pub fn nmi(&self) -> f64 {
        let n = self.total as f64;
        let rows = self.row_sums();
        let cols = self.column_sums();
        let mut numerator = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &nij) in row.iter().enumerate() {
                if nij > 0 {
                    let nij = nij as f64;
                    numerator += nij * (nij * n / (rows[i] as f64 * cols[j] as f64)).ln();
                }
            }
        }
        let entropy = |sums: &[u64]| -> f64 {
            sums.iter()
                .filter(|&&s| s > 0)
                .map(|&s| s as f64 * (s as f64 / n).ln())
                .sum()
        };
        let denominator = entropy(&rows) + entropy(&cols);
        if denominator == 0.0 {
            log::warn!("NMI undefined for two single-cluster partitions; reporting 0");
            return 0.0;
        }
        -2.0 * numerator / denominator
    }
}

/// Normalized mutual information of `pred` against `truth`.
pub fn nmi(pred: &Clustering, truth: &GroundTruth) -> Result<f64> {
    let cm = ConfusionMatrix::new(pred, truth);
    if cm.total == 0 {
        return Err(Error::Degenerate(
            "no vertex is covered by both the prediction and the ground truth".into(),
        ));
    }
    Ok(cm.nmi())
}

/// Cut size over the smaller of the two sides' total degrees.
pub fn conductance(graph: &Graph, cluster: &[VertexId]) -> Result<f64> {
    let n = graph.vertex_count();
    let mut inside = vec![false; n];
    let mut size = 0;
    for &v in cluster {
        if v.index() >= n {
            return Err(Error::param(format!("vertex {v} outside the graph")));
        }
        if !inside[v.index()] {
            inside[v.index()] = true;
            size += 1;
        }
    }
    if size == 0 || size == n {
        return Err(Error::Degenerate(
            "conductance needs a non-empty proper subset of the vertices".into(),
        ));
    }
    let mut volume = 0usize;
    let mut cut = 0usize;
    for (i, _) in inside.iter().enumerate().filter(|(_, &x)| x) {
        let nbrs = graph.neighbors(VertexId::from(i));
        volume += nbrs.len();
        cut += nbrs.iter().filter(|u| !inside[u.index()]).count();
    }
    let smaller = volume.min(2 * graph.edge_count() - volume);
    if smaller == 0 {
        return Err(Error::Degenerate(
            "conductance undefined: one side has no edges".into(),
        ));
    }
    Ok(cut as f64 / smaller as f64)
}

/// Mean conductance over the clusters of `pred`.
///
/// Clusters whose conductance is undefined (the whole vertex set, or a side
/// without edges) are skipped with a warning. Returns NaN if none remain.
pub fn mean_conductance(graph: &Graph, pred: &Clustering) -> f64 {
    let mut sum = 0.0;
    let mut count = 0;
    let mut skipped = 0;
    for c in pred.clusters() {
        match conductance(graph, &c.members) {
            Ok(x) => {
                sum += x;
                count += 1;
            }
            Err(_) => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("mean conductance skipped {skipped} cluster(s) with undefined conductance");
    }
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// `|A ∩ B| / |A ∪ B|`; fails when both sets are empty.
pub fn jaccard(found: &[VertexId], truth: &[VertexId]) -> Result<f64> {
    let a: BTreeSet<_> = found.iter().collect();
    let b: BTreeSet<_> = truth.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return Err(Error::Degenerate("Jaccard index of two empty sets".into()));
    }
    Ok(a.intersection(&b).count() as f64 / union as f64)
}

/// Outcome of [`rand_index_sampled`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandIndex {
    pub value: f64,
    pub true_positives: usize,
    pub true_negatives: usize,
    pub positive_pairs: usize,
    pub negative_pairs: usize,
}

/// Rand index over sampled vertex pairs.
///
/// Draws up to `pairs_per_class` distinct pairs that share a ground-truth
/// community (positives) and as many that share none (negatives), then
/// reports `(TP + TN) / (pairs drawn)`. When a class has no more than
/// `pairs_per_class` pairs, all of them are used, which makes the result the
/// exact Rand index once both classes are exhausted.
pub fn rand_index_sampled(
    pred: &Clustering,
    truth: &GroundTruth,
    pairs_per_class: usize,
    rng_seed: u64,
) -> Result<RandIndex> {
    if pairs_per_class == 0 {
        return Err(Error::param("pairs per class must be at least 1"));
    }
    let vertices = evaluated(pred, truth);
    let ne = vertices.len();
    let candidate_pairs = ne * ne.saturating_sub(1) / 2;

    let (positives, negatives) = if candidate_pairs <= ENUMERATION_LIMIT {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for &v in &vertices[i + 1..] {
                if truth.share_community(u, v) {
                    pos.push((u, v));
                } else {
                    neg.push((u, v));
                }
            }
        }
        check_feasible(pos.len(), neg.len())?;
        (
            subsample(pos, pairs_per_class, rng_seed, 1),
            subsample(neg, pairs_per_class, rng_seed, 2),
        )
    } else {
        (
            sample_positive(truth, pred, pairs_per_class, rng_seed)?,
            sample_negative(truth, &vertices, pairs_per_class, rng_seed)?,
        )
    };
    check_feasible(positives.len(), negatives.len())?;

    let same = |&(u, v): &(VertexId, VertexId)| pred.cluster_of(u) == pred.cluster_of(v);
    let tp = positives.iter().filter(|p| same(p)).count();
    let tn = negatives.iter().filter(|p| !same(p)).count();
    let total = positives.len() + negatives.len();
    Ok(RandIndex {
        value: (tp + tn) as f64 / total as f64,
        true_positives: tp,
        true_negatives: tn,
        positive_pairs: positives.len(),
        negative_pairs: negatives.len(),
    })
}

fn check_feasible(pos: usize, neg: usize) -> Result<()> {
    if pos == 0 {
        return Err(Error::param(
            "no vertex pair shares a ground-truth community",
        ));
    }
    if neg == 0 {
        return Err(Error::param(
            "every vertex pair shares a ground-truth community",
        ));
    }
    Ok(())
}

fn subsample<T: Copy>(all: Vec<T>, k: usize, seed: u64, stream: u64) -> Vec<T> {
    if all.len() <= k {
        return all;
    }
    let mut rng = rng::stream(seed, stream);
    let mut picked = index::sample(&mut rng, all.len(), k).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| all[i]).collect()
}

fn sample_positive(
    truth: &GroundTruth,
    pred: &Clustering,
    k: usize,
    seed: u64,
) -> Result<Vec<(VertexId, VertexId)>> {
    let communities: Vec<Vec<VertexId>> = truth
        .communities
        .iter()
        .map(|c| {
            c.iter()
                .copied()
                .filter(|&v| pred.cluster_of(v).is_some())
                .collect::<Vec<_>>()
        })
        .filter(|c| c.len() >= 2)
        .collect();
    if communities.is_empty() {
        return Err(Error::param(
            "no vertex pair shares a ground-truth community",
        ));
    }
    let weights = WeightedIndex::new(communities.iter().map(|c| {
        let s = c.len() as f64;
        s * (s - 1.0) / 2.0
    }))
    .expect("positive weights");
    let mut rng = rng::stream(seed, 1);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.saturating_mul(100) {
        if out.len() == k {
            break;
        }
        let c = &communities[weights.sample(&mut rng)];
        let i = rng.random_range(0..c.len());
        let j = rng.random_range(0..c.len());
        if i == j {
            continue;
        }
        let pair = (c[i].min(c[j]), c[i].max(c[j]));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}

fn sample_negative(
    truth: &GroundTruth,
    vertices: &[VertexId],
    k: usize,
    seed: u64,
) -> Result<Vec<(VertexId, VertexId)>> {
    let mut rng = rng::stream(seed, 2);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.saturating_mul(100) {
        if out.len() == k {
            break;
        }
        let u = vertices[rng.random_range(0..vertices.len())];
        let v = vertices[rng.random_range(0..vertices.len())];
        if u == v || truth.share_community(u, v) {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}
