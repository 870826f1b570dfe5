//! Clustering from walk feature vectors.
//!
//! Seeds are grouped by the attractor (argmax vertex) of their feature
//! vector. Groups whose significant vertex sets overlap by more than half of
//! the smaller set are merged. Global clustering repeats explore/merge rounds
//! over the not-yet-clustered vertices; local clustering explores the
//! insignificant part of one seed's walk a second time and keeps whatever
//! merges with the seed.

use std::collections::{btree_map, BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng;
use crate::walk::{LrwParams, SparseProbVector, WalkOutcome, Walker};

/// Attractor vertex of a feature vector and its significant vertices
/// `{ j : x_j > tau * x_max }`.
///
/// Panics on an empty feature.
pub fn attractor_and_significant(
    feature: &SparseProbVector,
    tau: f64,
) -> (VertexId, BTreeSet<VertexId>) {
    let (m, xm) = feature.argmax().expect("feature vector is empty");
    let cut = tau * xm;
    let significant = feature
        .iter()
        .filter(|&(_, x)| x > cut)
        .map(|(v, _)| v)
        .collect();
    (m, significant)
}

/// One group of seeds sharing an attractor.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterEntry {
    pub attractor: VertexId,
    pub members: BTreeSet<VertexId>,
    pub significant: BTreeSet<VertexId>,
    /// Largest `x_v / x_max` seen for `v` across the features merged into this
    /// entry. Covers members and significant vertices.
    affinity: BTreeMap<VertexId, f64>,
}

impl ClusterEntry {
    pub fn affinity(&self, v: VertexId) -> f64 {
        self.affinity.get(&v).copied().unwrap_or(0.0)
    }

    fn absorb(&mut self, other: ClusterEntry) {
        self.members.extend(other.members);
        self.significant.extend(other.significant);
        for (v, a) in other.affinity {
            raise(&mut self.affinity, v, a);
        }
    }
}

fn raise(map: &mut BTreeMap<VertexId, f64>, v: VertexId, a: f64) {
    let slot = map.entry(v).or_insert(a);
    if a > *slot {
        *slot = a;
    }
}

/// Attractor-keyed dictionary of cluster entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterDictionary {
    entries: BTreeMap<VertexId, ClusterEntry>,
}

impl ClusterDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, attractor: VertexId) -> Option<&ClusterEntry> {
        self.entries.get(&attractor)
    }

    /// Entries in ascending attractor order.
    pub fn entries(&self) -> impl Iterator<Item = &ClusterEntry> {
        self.entries.values()
    }

    /// Adds `seed` under the attractor of its feature vector, creating the
    /// entry if needed, and unions in the feature's significant vertices.
    /// Returns the attractor.
    pub fn insert_feature(
        &mut self,
        seed: VertexId,
        feature: &SparseProbVector,
        tau: f64,
    ) -> VertexId {
        let (m, significant) = attractor_and_significant(feature, tau);
        let xm = feature.get(m);
        let entry = self.entries.entry(m).or_insert_with(|| ClusterEntry {
            attractor: m,
            members: BTreeSet::new(),
            significant: BTreeSet::new(),
            affinity: BTreeMap::new(),
        });
        entry.members.insert(seed);
        raise(&mut entry.affinity, seed, feature.get(seed) / xm);
        for &v in &significant {
            raise(&mut entry.affinity, v, feature.get(v) / xm);
        }
        entry.significant.extend(significant);
        m
    }

    /// Merges entries whose significant sets share more than half of the
    /// smaller set, scanning pairs in ascending `(m1, m2)` order and merging
    /// `m2` into `m1`. Passes repeat until one makes no merge. Returns the
    /// number of merges.
    pub fn merge_overlapping(&mut self) -> usize {
        let mut merges = 0;
        loop {
            let mut changed = false;
            let keys: Vec<VertexId> = self.entries.keys().copied().collect();
            for (i, &m1) in keys.iter().enumerate() {
                if !self.entries.contains_key(&m1) {
                    continue;
                }
                for &m2 in &keys[i + 1..] {
                    let Some(second) = self.entries.get(&m2) else {
                        continue;
                    };
                    let first = &self.entries[&m1];
                    if overlaps(&first.significant, &second.significant) {
                        let absorbed = self.entries.remove(&m2).expect("present");
                        self.entries.get_mut(&m1).expect("present").absorb(absorbed);
                        merges += 1;
                        changed = true;
                    }
                }
            }
            if !changed {
                return merges;
            }
        }
    }

    /// `S_m <- S_m ∪ F_m` for every entry.
    pub fn fold_significant_into_members(&mut self) {
        for entry in self.entries.values_mut() {
            let significant = entry.significant.clone();
            entry.members.extend(significant);
        }
    }

    /// Union of all member sets.
    pub fn clustered(&self) -> BTreeSet<VertexId> {
        self.entries
            .values()
            .flat_map(|e| e.members.iter().copied())
            .collect()
    }

    /// Entry whose members contain `v`, lowest attractor first.
    pub fn entry_containing(&self, v: VertexId) -> Option<&ClusterEntry> {
        self.entries.values().find(|e| e.members.contains(&v))
    }

    /// Resolves the member sets into a partition of `0..n`.
    ///
    /// A vertex claimed by several entries goes to the one with the highest
    /// affinity for it, ties to the smallest attractor. Vertices claimed by
    /// no entry become singleton clusters.
    pub fn into_clustering(self, n: usize) -> Clustering {
        let mut owner: Vec<Option<(VertexId, f64)>> = vec![None; n];
        for entry in self.entries.values() {
            for &v in &entry.members {
                let a = entry.affinity(v);
                let slot = &mut owner[v.index()];
                match slot {
                    Some((_, best)) if a <= *best => {}
                    _ => *slot = Some((entry.attractor, a)),
                }
            }
        }
        let mut groups: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        let mut singletons = Vec::new();
        for (i, o) in owner.into_iter().enumerate() {
            match o {
                Some((m, _)) => groups.entry(m).or_default().push(VertexId::from(i)),
                None => singletons.push(VertexId::from(i)),
            }
        }
        let mut clusters: Vec<Cluster> = groups
            .into_iter()
            .map(|(m, members)| Cluster {
                attractor: Some(m),
                members,
            })
            .collect();
        clusters.extend(singletons.into_iter().map(|v| Cluster {
            attractor: Some(v),
            members: vec![v],
        }));
        Clustering::from_clusters(n, clusters)
    }
}

fn overlaps(a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> bool {
    let shared = if a.len() <= b.len() {
        a.iter().filter(|v| b.contains(v)).count()
    } else {
        b.iter().filter(|v| a.contains(v)).count()
    };
    2 * shared > a.len().min(b.len())
}

/// One cluster of a [`Clustering`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    /// Attractor vertex that identifies the cluster, when known.
    pub attractor: Option<VertexId>,
    /// Sorted member vertices.
    pub members: Vec<VertexId>,
}

/// A set of pairwise disjoint clusters over the vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    clusters: Vec<Cluster>,
    assignment: Vec<Option<usize>>,
}

impl Clustering {
    /// Panics if two clusters share a vertex or a member is out of range.
    pub fn from_clusters(n: usize, mut clusters: Vec<Cluster>) -> Self {
        clusters.retain(|c| !c.members.is_empty());
        let mut assignment = vec![None; n];
        for (ci, c) in clusters.iter_mut().enumerate() {
            c.members.sort_unstable();
            for &v in &c.members {
                let slot = &mut assignment[v.index()];
                assert!(slot.is_none(), "vertex {v} assigned to two clusters");
                *slot = Some(ci);
            }
        }
        Clustering {
            clusters,
            assignment,
        }
    }

    /// Clusters from per-vertex labels; cluster order follows first
    /// appearance of each label.
    pub fn from_labels<L: Ord + Clone>(labels: &[Option<L>]) -> Self {
        let mut index: BTreeMap<L, usize> = BTreeMap::new();
        let mut clusters: Vec<Cluster> = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            if let Some(label) = label {
                let next = clusters.len();
                let ci = match index.entry(label.clone()) {
                    btree_map::Entry::Occupied(e) => *e.get(),
                    btree_map::Entry::Vacant(e) => {
                        e.insert(next);
                        clusters.push(Cluster {
                            attractor: None,
                            members: Vec::new(),
                        });
                        next
                    }
                };
                clusters[ci].members.push(VertexId::from(i));
            }
        }
        Clustering::from_clusters(labels.len(), clusters)
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_of(&self, v: VertexId) -> Option<usize> {
        self.assignment.get(v.index()).copied().flatten()
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }
}

/// Fixed-size pool of exploration workers.
pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::param("worker count must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))?;
        Ok(Workers { pool })
    }

    /// One worker per available hardware thread.
    pub fn available() -> Self {
        let n = std::thread::available_parallelism().map_or(1, |n| n.get());
        Workers::new(n).expect("non-zero worker count")
    }

    pub fn count(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Explores every seed; outcomes come back in seed order.
    pub fn explore_all(
        &self,
        graph: &Graph,
        seeds: &[VertexId],
        params: &LrwParams,
    ) -> Vec<WalkOutcome> {
        self.pool.install(|| {
            seeds
                .par_iter()
                .map_init(|| Walker::new(graph, *params), |w, &s| w.explore(s))
                .collect()
        })
    }
}

impl std::fmt::Debug for Workers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workers")
            .field("count", &self.count())
            .finish()
    }
}

/// Options of a global clustering run besides the walk parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlobalOptions {
    /// Seed for sampling the per-round seed batches.
    pub rng_seed: u64,
    /// Run the overlap-merging step after each round.
    pub merge: bool,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        GlobalOptions {
            rng_seed: 0,
            merge: true,
        }
    }
}

/// Counters and phase timings of a global run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub rounds: usize,
    pub walks: usize,
    pub unconverged: usize,
    pub merges: usize,
    pub explore_time: Duration,
    pub merge_time: Duration,
}

#[derive(Debug, Clone)]
pub struct GlobalRun {
    pub clustering: Clustering,
    pub stats: RunStats,
}

/// Multi-stage global clustering.
///
/// Each round samples a batch from the unclustered vertices (all of them when
/// they fit in one batch), explores the batch in parallel, inserts the
/// features in ascending seed order, merges overlapping entries and removes
/// every clustered vertex from the pool.
pub fn cluster_global(
    graph: &Graph,
    params: &LrwParams,
    workers: &Workers,
    options: &GlobalOptions,
) -> Result<GlobalRun> {
    params.validate()?;
    let n = graph.vertex_count();
    let mut stats = RunStats::default();
    let mut dict = ClusterDictionary::new();
    let mut remaining: Vec<VertexId> = graph.vertices().collect();
    let mut clustered = vec![false; n];

    while !remaining.is_empty() {
        let batch_size = params.batch_size_for(remaining.len());
        let batch: Vec<VertexId> = if remaining.len() <= batch_size {
            remaining.clone()
        } else {
            let mut rng = rng::stream(options.rng_seed, stats.rounds as u64);
            let mut picked: Vec<VertexId> = index::sample(&mut rng, remaining.len(), batch_size)
                .into_iter()
                .map(|i| remaining[i])
                .collect();
            picked.sort_unstable();
            picked
        };
        stats.rounds += 1;

        let start = Instant::now();
        let outcomes = workers.explore_all(graph, &batch, params);
        stats.explore_time += start.elapsed();

        let start = Instant::now();
        stats.walks += outcomes.len();
        for (&seed, outcome) in batch.iter().zip(&outcomes) {
            if !outcome.converged {
                stats.unconverged += 1;
            }
            dict.insert_feature(seed, &outcome.feature, params.tau);
        }
        if options.merge {
            stats.merges += dict.merge_overlapping();
        }
        dict.fold_significant_into_members();
        for entry in dict.entries() {
            for &v in &entry.members {
                clustered[v.index()] = true;
            }
        }
        let before = remaining.len();
        remaining.retain(|v| !clustered[v.index()]);
        stats.merge_time += start.elapsed();
        assert!(
            remaining.len() < before,
            "a round must cluster every explored seed"
        );
    }
    if stats.unconverged > 0 {
        log::info!(
            "{} of {} walks stopped at t_max without converging",
            stats.unconverged,
            stats.walks
        );
    }
    Ok(GlobalRun {
        clustering: dict.into_clustering(n),
        stats,
    })
}

/// Result of local clustering around one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCluster {
    /// Sorted member vertices, always containing the seed.
    pub members: Vec<VertexId>,
    /// Vertices taken directly from the seed's walk (`x_j >= eta * x_max`).
    pub significant: usize,
    /// Low-probability vertices that were explored a second time.
    pub explored: usize,
}

/// Local cluster containing `seed`.
pub fn cluster_local(
    graph: &Graph,
    seed: VertexId,
    params: &LrwParams,
    workers: &Workers,
) -> Result<LocalCluster> {
    params.validate()?;
    if seed.index() >= graph.vertex_count() {
        return Err(Error::param(format!(
            "seed {seed} out of range for {} vertices",
            graph.vertex_count()
        )));
    }
    let first = Walker::new(graph, *params).explore(seed);
    let s2 = split_local(&first.feature, params.eta).1;
    let outcomes = workers.explore_all(graph, &s2, params);
    let by_vertex: BTreeMap<VertexId, &SparseProbVector> = s2
        .iter()
        .copied()
        .zip(outcomes.iter().map(|o| &o.feature))
        .collect();
    Ok(local_from_features(seed, &first.feature, params, |v| {
        by_vertex[&v]
    }))
}

fn split_local(feature: &SparseProbVector, eta: f64) -> (Vec<VertexId>, Vec<VertexId>) {
    let (_, xm) = feature.argmax().expect("walk keeps some mass");
    let cut = eta * xm;
    let (s1, s2): (Vec<_>, Vec<_>) = feature.iter().partition(|&(_, x)| x >= cut);
    (
        s1.into_iter().map(|(v, _)| v).collect(),
        s2.into_iter().map(|(v, _)| v).collect(),
    )
}

/// The assembly half of [`cluster_local`], for callers that already hold
/// explored features (e.g. a table of every vertex's feature on one graph).
///
/// `feature_of(v)` must return the feature of `v` under the same `params`; it
/// is called for every vertex of S2.
pub fn local_from_features<'a, F>(
    seed: VertexId,
    seed_feature: &'a SparseProbVector,
    params: &LrwParams,
    feature_of: F,
) -> LocalCluster
where
    F: Fn(VertexId) -> &'a SparseProbVector,
{
    let (s1, s2) = split_local(seed_feature, params.eta);
    let mut features: Vec<(VertexId, &SparseProbVector)> =
        s2.iter().map(|&v| (v, feature_of(v))).collect();
    if !s2.contains(&seed) {
        features.push((seed, seed_feature));
    }
    features.sort_unstable_by_key(|&(v, _)| v);

    let mut dict = ClusterDictionary::new();
    for (v, feature) in features {
        dict.insert_feature(v, feature, params.tau);
    }
    dict.merge_overlapping();
    let mut members: BTreeSet<VertexId> = s1.iter().copied().collect();
    if let Some(entry) = dict.entry_containing(seed) {
        members.extend(entry.members.iter().copied());
    }
    LocalCluster {
        members: members.into_iter().collect(),
        significant: s1.len(),
        explored: s2.len(),
    }
}
