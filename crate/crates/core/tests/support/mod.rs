//! Dense reference implementations used as test oracles.
#![allow(dead_code)]

use lrw::{Graph, LrwParams, SparseProbVector, VertexId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Explicit `n x n` column-stochastic matrix `(I + A)(I + D)^-1`.
pub fn dense_transition(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for (u, v) in g.edges() {
        a[u.index()][v.index()] = 1.0;
        a[v.index()][u.index()] = 1.0;
    }
    for j in 0..n {
        let col: f64 = (0..n).map(|i| a[i][j]).sum();
        for row in a.iter_mut() {
            row[j] /= col;
        }
    }
    a
}

/// One dense iteration: multiply, prune entries below `epsilon`, raise to
/// `r`, rescale to unit sum.
pub fn dense_iterate(p: &[Vec<f64>], x: &[f64], epsilon: f64, r: f64) -> Vec<f64> {
    let n = x.len();
    let mut y: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| p[i][j] * x[j]).sum())
        .collect();
    if y.iter().all(|&v| v < epsilon) {
        let mut best = 0;
        for i in 1..n {
            if y[i] > y[best] {
                best = i;
            }
        }
        y = vec![0.0; n];
        y[best] = 1.0;
    }
    for v in y.iter_mut() {
        if *v < epsilon {
            *v = 0.0;
        }
        *v = v.powf(r);
    }
    let total: f64 = y.iter().sum();
    y.iter().map(|v| v / total).collect()
}

/// Every iterate of a dense walk from `seed`, stopping on the same rule as
/// the library (L2 step below `xi`, or `t_max`).
pub fn dense_walk(g: &Graph, seed: usize, params: &LrwParams) -> Vec<Vec<f64>> {
    let p = dense_transition(g);
    let mut x = vec![0.0; g.vertex_count()];
    x[seed] = 1.0;
    let mut out = Vec::new();
    for _ in 0..params.t_max {
        let next = dense_iterate(&p, &x, params.epsilon, params.r);
        let delta: f64 = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        out.push(next.clone());
        x = next;
        if delta < params.xi {
            break;
        }
    }
    out
}

pub fn to_dense(x: &SparseProbVector, n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    for (v, p) in x.iter() {
        d[v.index()] = p;
    }
    d
}

pub fn complete(n: u32) -> Graph {
    Graph::from_edges(
        n as usize,
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))),
    )
}

pub fn ring(n: u32) -> Graph {
    Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Two `K_k` cliques on `0..k` and `k..2k` joined by the edge `(k-1, k)`.
pub fn barbell(k: u32) -> Graph {
    let left = (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)));
    let right = (k..2 * k).flat_map(move |i| (i + 1..2 * k).map(move |j| (i, j)));
    Graph::from_edges(2 * k as usize, left.chain(right).chain([(k - 1, k)]))
}

/// Erdős–Rényi `G(n, p)`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

pub fn ids(v: impl IntoIterator<Item = u32>) -> Vec<VertexId> {
    v.into_iter().map(VertexId).collect()
}

/// Karate club graph and the two-faction split, in compact ids.
pub fn karate() -> (Graph, Vec<Vec<VertexId>>) {
    let loaded = lrw::load_edge_list(&include_bytes!("../data/karate.txt")[..]).unwrap();
    let lines =
        lrw::io::read_cluster_lines(&include_bytes!("../data/karate_factions.txt")[..]).unwrap();
    let factions = lines
        .iter()
        .map(|l| {
            l.iter()
                .map(|&id| loaded.ids.compact(id).unwrap())
                .collect()
        })
        .collect();
    (loaded.graph, factions)
}

/// Counts cut edges and volumes straight from the edge list.
pub fn conductance_oracle(g: &lrw::Graph, set: &[VertexId]) -> f64 {
    let inside = |v: VertexId| set.contains(&v);
    let (mut cut, mut vol_in, mut vol_out) = (0.0, 0.0, 0.0);
    for (u, v) in g.edges() {
        match (inside(u), inside(v)) {
            (true, true) => vol_in += 2.0,
            (false, false) => vol_out += 2.0,
            _ => {
                cut += 1.0;
                vol_in += 1.0;
                vol_out += 1.0;
            }
        }
    }
    cut / f64::min(vol_in, vol_out)
}

/// Rand index over all vertex pairs.
pub fn exhaustive_rand(pred: &[usize], truth: &[usize]) -> f64 {
    let mut agree = 0;
    let mut total = 0;
    for i in 0..pred.len() {
        for j in i + 1..pred.len() {
            total += 1;
            if (pred[i] == pred[j]) == (truth[i] == truth[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}
