//! Synthetic benchmark graphs with planted ground truth.
//!
//! * [`generate_planted`]: `c` equal clusters, every vertex pair linked
//!   independently with an intra- or inter-cluster probability chosen so that
//!   the expected degree is `d` and `d_in / d_out = q`.
//! * [`generate_powerlaw`]: power-law degrees and cluster sizes, edges split
//!   `q : 1` between inside and outside the cluster by configuration-model
//!   stub matching.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, Rng};

const MATCH_RETRIES: usize = 100;

/// A graph with a ground-truth cluster label per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<usize>,
}

impl LabeledGraph {
    pub fn cluster_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    /// Counts `(intra, inter)` cluster edges.
    pub fn edge_split(&self) -> (usize, usize) {
        self.graph.edges().fold((0, 0), |(intra, inter), (u, v)| {
            if self.labels[u.index()] == self.labels[v.index()] {
                (intra + 1, inter)
            } else {
                (intra, inter + 1)
            }
        })
    }

    /// Writes `vertex \t cluster` lines.
    pub fn write_labels<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for (v, l) in self.labels.iter().enumerate() {
            writeln!(out, "{v}\t{l}")?;
        }
        Ok(())
    }
}

/// Parameters of the planted partition model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedPartitionSpec {
    pub n: usize,
    /// Expected degree; the overall link probability is `d / (n - 1)`.
    pub d: f64,
    /// Number of clusters, at least 2 and dividing `n`.
    pub c: usize,
    /// Expected intra-cluster over inter-cluster degree.
    pub q: f64,
    pub rng_seed: u64,
}

impl PlantedPartitionSpec {
    /// `(p_in, p_out)` pair probabilities, validated.
    pub fn probabilities(&self) -> Result<(f64, f64)> {
        let PlantedPartitionSpec { n, d, c, q, .. } = *self;
        if c < 2 {
            return Err(Error::param(format!(
                "cluster count c must be at least 2, got {c}"
            )));
        }
        if n < c || n % c != 0 {
            return Err(Error::param(format!(
                "cluster count c = {c} must divide the vertex count n = {n}"
            )));
        }
        if n == c {
            return Err(Error::param("clusters need at least two vertices"));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::param(format!(
                "expected degree d must be positive, got {d}"
            )));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::param(format!("ratio q must be positive, got {q}")));
        }
        let (nf, cf) = (n as f64, c as f64);
        let p = d / (nf - 1.0);
        let p_in = q * p * cf * (nf - 1.0) / ((q + 1.0) * (nf - cf));
        let p_out = p * cf * (nf - 1.0) / (nf * (q + 1.0) * (cf - 1.0));
        if p_in > 1.0 {
            return Err(Error::param(format!(
                "intra-cluster probability {p_in:.4} exceeds 1"
            )));
        }
        if p_out > 1.0 {
            return Err(Error::param(format!(
                "inter-cluster probability {p_out:.4} exceeds 1"
            )));
        }
        Ok((p_in, p_out))
    }
}

/// Planted partition graph; vertex `v` belongs to cluster `v / (n / c)`.
pub fn generate_planted(spec: &PlantedPartitionSpec) -> Result<LabeledGraph> {
    let (p_in, p_out) = spec.probabilities()?;
    let size = spec.n / spec.c;
    let labels: Vec<usize> = (0..spec.n).map(|v| v / size).collect();
    let mut rng = rng::stream(spec.rng_seed, 0);
    let mut edges = Vec::new();
    for u in 0..spec.n {
        for v in u + 1..spec.n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Ok(LabeledGraph {
        graph: Graph::from_edges(spec.n, edges),
        labels,
    })
}

/// Parameters of the power-law benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawSpec {
    pub n: usize,
    pub degree_min: usize,
    pub degree_max: usize,
    pub cluster_min: usize,
    pub cluster_max: usize,
    /// Exponent of the degree distribution `P(k) ~ k^-exponent`.
    pub exponent_degree: f64,
    /// Exponent of the cluster size distribution.
    pub exponent_size: f64,
    pub q: f64,
    pub rng_seed: u64,
}

impl Default for PowerLawSpec {
    fn default() -> Self {
        PowerLawSpec {
            n: 2048,
            degree_min: 16,
            degree_max: 128,
            cluster_min: 16,
            cluster_max: 256,
            exponent_degree: 2.0,
            exponent_size: 1.0,
            q: 4.0,
            rng_seed: 0,
        }
    }
}

impl PowerLawSpec {
    fn validate(&self) -> Result<()> {
        if self.degree_min == 0 || self.degree_min > self.degree_max || self.degree_max >= self.n {
            return Err(Error::param(format!(
                "degree bounds must satisfy 1 <= {} <= {} < n = {}",
                self.degree_min, self.degree_max, self.n
            )));
        }
        if self.cluster_min < 2 || self.cluster_min > self.cluster_max || self.cluster_max > self.n
        {
            return Err(Error::param(format!(
                "cluster size bounds must satisfy 2 <= {} <= {} <= n = {}",
                self.cluster_min, self.cluster_max, self.n
            )));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::param(format!(
                "ratio q must be positive, got {}",
                self.q
            )));
        }
        for (name, e) in [
            ("degree exponent", self.exponent_degree),
            ("size exponent", self.exponent_size),
        ] {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::param(format!(
                    "{name} must be non-negative, got {e}"
                )));
            }
        }
        Ok(())
    }

    /// Number of a vertex's `degree` edges that should stay inside its cluster.
    fn internal_degree(&self, degree: usize) -> usize {
        let k = (degree as f64 * self.q / (self.q + 1.0)).round() as usize;
        k.min(degree)
    }
}

fn power_law(lo: usize, hi: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((lo..=hi).map(|k| (k as f64).powf(-exponent)))
        .expect("non-empty positive weights")
}

/// Power-law benchmark graph with planted clusters.
///
/// Stub pairs that would form a self-loop, a parallel edge, or (for external
/// stubs) an intra-cluster edge are redrawn up to 100 times. Stubs still
/// unmatched are placed by rewiring an existing edge; only stubs that cannot
/// be placed that way either are dropped.
pub fn generate_powerlaw(spec: &PowerLawSpec) -> Result<LabeledGraph> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = rng::stream(spec.rng_seed, 0);

    let degree_dist = power_law(spec.degree_min, spec.degree_max, spec.exponent_degree);
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| spec.degree_min + degree_dist.sample(&mut rng))
        .collect();
    let sizes = cluster_sizes(spec, &mut rng);
    let mut internal: Vec<usize> = degrees.iter().map(|&k| spec.internal_degree(k)).collect();
    let labels = assign_clusters(&internal, &sizes, &mut rng)?;

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); sizes.len()];
    for (v, &l) in labels.iter().enumerate() {
        members[l].push(v as u32);
    }
    fix_parity(spec, &members, &mut degrees, &mut internal, &mut rng);

    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    let mut dropped = 0;
    for (c, cluster) in members.iter().enumerate() {
        let stubs: Vec<u32> = cluster
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, internal[v as usize]))
            .collect();
        dropped += match_stubs(stubs, &mut rng, &mut edges, |u, v| {
            labels[u as usize] == c && labels[v as usize] == c
        });
    }
    let stubs: Vec<u32> = (0..n as u32)
        .flat_map(|v| std::iter::repeat_n(v, degrees[v as usize] - internal[v as usize]))
        .collect();
    dropped += match_stubs(stubs, &mut rng, &mut edges, |u, v| {
        labels[u as usize] != labels[v as usize]
    });
    if dropped > 0 {
        log::debug!("power-law generator dropped {dropped} unmatched stub(s)");
    }

    let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
    edges.sort_unstable();
    Ok(LabeledGraph {
        graph: Graph::from_edges(n, edges),
        labels,
    })
}

/// Sizes drawn until they cover `n`. The last one is clipped; a clipped
/// remainder below `cluster_min` is spread over the other clusters.
fn cluster_sizes(spec: &PowerLawSpec, rng: &mut Rng) -> Vec<usize> {
    let dist = power_law(spec.cluster_min, spec.cluster_max, spec.exponent_size);
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < spec.n {
        let s = (spec.cluster_min + dist.sample(rng)).min(spec.n - total);
        sizes.push(s);
        total += s;
    }
    let last = *sizes.last().expect("n > 0");
    if last < spec.cluster_min && sizes.len() > 1 {
        sizes.pop();
        for _ in 0..last {
            let i = (0..sizes.len())
                .min_by_key(|&i| sizes[i])
                .expect("at least one cluster");
            sizes[i] += 1;
        }
    }
    sizes
}

/// Places vertices, largest internal degree first, into clusters that can
/// host their internal edges; a cluster is chosen with probability
/// proportional to its free slots.
fn assign_clusters(internal: &[usize], sizes: &[usize], rng: &mut Rng) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..internal.len()).collect();
    order.shuffle(rng);
    order.sort_by_key(|&v| std::cmp::Reverse(internal[v]));
    let mut free: Vec<usize> = sizes.to_vec();
    let mut labels = vec![0; internal.len()];
    for v in order {
        let eligible: Vec<usize> = (0..sizes.len())
            .filter(|&c| free[c] > 0 && sizes[c] > internal[v])
            .collect();
        if eligible.is_empty() {
            return Err(Error::param(format!(
                "infeasible spec: no cluster can host a vertex with {} internal edges",
                internal[v]
            )));
        }
        let weights = WeightedIndex::new(eligible.iter().map(|&c| free[c] as f64))
            .expect("free slots are positive");
        let c = eligible[weights.sample(rng)];
        free[c] -= 1;
        labels[v] = c;
    }
    Ok(labels)
}

/// Makes every cluster's internal stub count and the total external stub
/// count even, so stub matching can pair everything. An odd cluster turns one
/// external stub of its vertex with the most external stubs into an internal
/// one; an odd external total gains one stub on a vertex below `degree_max`.
fn fix_parity(
    spec: &PowerLawSpec,
    members: &[Vec<u32>],
    degrees: &mut [usize],
    internal: &mut [usize],
    rng: &mut Rng,
) {
    for cluster in members {
        let total: usize = cluster.iter().map(|&v| internal[v as usize]).sum();
        if total.is_multiple_of(2) {
            continue;
        }
        let best = cluster
            .iter()
            .map(|&v| v as usize)
            .filter(|&v| internal[v] + 1 < cluster.len())
            .max_by_key(|&v| (degrees[v] - internal[v], std::cmp::Reverse(v)));
        if let Some(v) = best.filter(|&v| degrees[v] > internal[v]) {
            internal[v] += 1;
        }
    }
    let external: usize = degrees
        .iter()
        .zip(internal.iter())
        .map(|(d, i)| d - i)
        .sum();
    if !external.is_multiple_of(2) {
        let room: Vec<usize> = (0..degrees.len())
            .filter(|&v| degrees[v] < spec.degree_max)
            .collect();
        if !room.is_empty() {
            degrees[room[rng.random_range(0..room.len())]] += 1;
        }
    }
}

/// Random stub matching; returns the number of stubs left unmatched.
///
/// A stub that finds no partner within the retry budget is parked. Parked
/// stubs are then paired up by rewiring: an existing edge `(a, b)` of the
/// same kind is replaced by `(u, a)` and `(v, b)`, which keeps the degrees of
/// `a` and `b` and gives `u` and `v` their missing edge.
fn match_stubs<F>(
    mut stubs: Vec<u32>,
    rng: &mut Rng,
    edges: &mut HashSet<(u32, u32)>,
    allowed: F,
) -> usize
where
    F: Fn(u32, u32) -> bool,
{
    let key = |a: u32, b: u32| (a.min(b), a.max(b));
    stubs.shuffle(rng);
    let mut made: Vec<(u32, u32)> = Vec::new();
    let mut parked = Vec::new();
    while let Some(u) = stubs.pop() {
        if stubs.is_empty() {
            parked.push(u);
            break;
        }
        let mut matched = false;
        for _ in 0..MATCH_RETRIES {
            let i = rng.random_range(0..stubs.len());
            let v = stubs[i];
            if u != v && allowed(u, v) && !edges.contains(&key(u, v)) {
                stubs.swap_remove(i);
                edges.insert(key(u, v));
                made.push((u, v));
                matched = true;
                break;
            }
        }
        if !matched {
            parked.push(u);
        }
    }

    let mut dropped = 0;
    while let Some(u) = parked.pop() {
        let Some(v) = parked.pop() else {
            dropped += 1;
            break;
        };
        let mut rewired = false;
        for _ in 0..MATCH_RETRIES * 10 {
            if made.is_empty() {
                break;
            }
            let k = rng.random_range(0..made.len());
            let (a, b) = if rng.random() {
                made[k]
            } else {
                (made[k].1, made[k].0)
            };
            let (e1, e2) = (key(u, a), key(v, b));
            if u == a
                || v == b
                || e1 == e2
                || !allowed(u, a)
                || !allowed(v, b)
                || edges.contains(&e1)
                || edges.contains(&e2)
            {
                continue;
            }
            edges.remove(&key(a, b));
            edges.insert(e1);
            edges.insert(e2);
            made[k] = (u, a);
            made.push((v, b));
            rewired = true;
            break;
        }
        if !rewired {
            dropped += 2;
        }
    }
    dropped
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(n: usize, d: f64, c: usize, q: f64, seed: u64) -> PlantedPartitionSpec {
        PlantedPartitionSpec {
            n,
            d,
            c,
            q,
            rng_seed: seed,
        }
    }

    #[test]
    fn planted_has_equal_clusters() {
        let lg = generate_planted(&planted(128, 16.0, 4, 4.0, 1)).unwrap();
        assert_eq!(lg.graph.vertex_count(), 128);
        assert_eq!(lg.cluster_count(), 4);
        for c in 0..4 {
            assert_eq!(lg.labels.iter().filter(|&&l| l == c).count(), 32);
        }
    }

    #[test]
    fn planted_probabilities_match_closed_form() {
        let (p_in, p_out) = planted(128, 16.0, 4, 4.0, 0).probabilities().unwrap();
        // d_in = p_in (n/c - 1) = q d / (q + 1), d_out = p_out n (c-1)/c = d / (q + 1)
        assert!((p_in * 31.0 - 12.8).abs() < 1e-12);
        assert!((p_out * 96.0 - 3.2).abs() < 1e-12);
    }

    #[test]
    fn planted_rejects_bad_specs() {
        assert!(planted(128, 16.0, 1, 4.0, 0).probabilities().is_err());
        assert!(planted(130, 16.0, 4, 4.0, 0).probabilities().is_err());
        assert!(planted(128, 0.0, 4, 4.0, 0).probabilities().is_err());
        assert!(planted(128, 16.0, 4, -1.0, 0).probabilities().is_err());
        let err = planted(16, 14.0, 4, 100.0, 0).probabilities().unwrap_err();
        assert!(err.to_string().contains("intra-cluster"), "{err}");
    }

    #[test]
    fn planted_strong_limit_has_no_inter_edges() {
        let lg = generate_planted(&planted(128, 16.0, 4, 1e6, 3)).unwrap();
        let (_, inter) = lg.edge_split();
        assert!(inter <= 2, "{inter}");
    }

    #[test]
    fn powerlaw_respects_size_bounds() {
        let spec = PowerLawSpec {
            rng_seed: 5,
            ..Default::default()
        };
        let sizes = cluster_sizes(&spec, &mut rng::stream(5, 0));
        assert_eq!(sizes.iter().sum::<usize>(), 2048);
        assert!(sizes.iter().all(|&s| s >= 16));
    }

    #[test]
    fn powerlaw_rejects_bad_specs() {
        let base = PowerLawSpec::default();
        assert!(generate_powerlaw(&PowerLawSpec {
            degree_max: 2048,
            ..base
        })
        .is_err());
        assert!(generate_powerlaw(&PowerLawSpec {
            cluster_min: 300,
            ..base
        })
        .is_err());
        assert!(generate_powerlaw(&PowerLawSpec { q: 0.0, ..base }).is_err());
        // internal degree ~ 102 cannot fit in clusters of at most 40
        let tight = PowerLawSpec {
            cluster_min: 20,
            cluster_max: 40,
            ..base
        };
        assert!(matches!(
            generate_powerlaw(&tight),
            Err(Error::InvalidParameter(_))
        ));
    }
}
