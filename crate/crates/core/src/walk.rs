//! The limited random walk from a single seed vertex.
//!
//! One iteration maps `x` to `normalize(inflate(prune(P x)))`. Iteration stops
//! once two consecutive vectors are closer than `xi` in L2 or after `t_max`
//! iterations.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Sparse non-negative vector over vertices, sorted by vertex, zeros omitted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseProbVector {
    entries: Vec<(VertexId, f64)>,
}

impl SparseProbVector {
    /// All mass on `v`.
    pub fn point(v: VertexId) -> Self {
        SparseProbVector {
            entries: vec![(v, 1.0)],
        }
    }

    /// Builds a vector from `(vertex, value)` pairs in any order.
    ///
    /// Zero values are dropped. Fails on negative or non-finite values and on
    /// repeated vertices.
    pub fn from_entries(mut entries: Vec<(VertexId, f64)>) -> Result<Self> {
        if let Some(&(v, x)) = entries.iter().find(|(_, x)| !x.is_finite() || *x < 0.0) {
            return Err(Error::param(format!("entry for vertex {v} is {x}")));
        }
        entries.retain(|&(_, x)| x > 0.0);
        entries.sort_unstable_by_key(|&(v, _)| v);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param("repeated vertex in sparse vector"));
        }
        Ok(SparseProbVector { entries })
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<(VertexId, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, x)| x > 0.0));
        SparseProbVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(VertexId, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (VertexId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn support(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.entries
            .binary_search_by_key(&v, |&(u, _)| u)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, x)| x).sum()
    }

    /// Largest entry; ties go to the smallest vertex id.
    pub fn argmax(&self) -> Option<(VertexId, f64)> {
        let mut best: Option<(VertexId, f64)> = None;
        for &(v, x) in &self.entries {
            match best {
                Some((_, b)) if x <= b => {}
                _ => best = Some((v, x)),
            }
        }
        best
    }

    /// L2 distance over the union of both supports.
    pub fn l2_distance(&self, other: &SparseProbVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < a.len() || j < b.len() {
            let d = match (a.get(i), b.get(j)) {
                (Some(&(u, x)), Some(&(v, y))) if u == v => {
                    i += 1;
                    j += 1;
                    x - y
                }
                (Some(&(u, x)), Some(&(v, _))) if u < v => {
                    i += 1;
                    x
                }
                (Some(&(_, x)), None) => {
                    i += 1;
                    x
                }
                (_, Some(&(_, y))) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            acc += d * d;
        }
        acc.sqrt()
    }
}

/// Tunable parameters of exploration, merging and local clustering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrwParams {
    /// Inflation exponent, `> 1`.
    pub r: f64,
    /// Maximum number of iterations per walk.
    pub t_max: usize,
    /// Entries below this value are pruned after each transition.
    pub epsilon: f64,
    /// Convergence threshold on the L2 change between iterations.
    pub xi: f64,
    /// Relative significance threshold used when merging clusters.
    pub tau: f64,
    /// Relative significance threshold for local clustering.
    pub eta: f64,
    /// Seeds explored per multi-stage round; `None` picks
    /// `max(1024, ceil(|B| / 100))` from the unclustered count `|B|`.
    pub batch_size: Option<usize>,
}

impl Default for LrwParams {
    fn default() -> Self {
        LrwParams {
            r: 2.0,
            t_max: 100,
            epsilon: 1e-5,
            xi: 1e-9,
            tau: 0.3,
            eta: 0.3,
            batch_size: None,
        }
    }
}

impl LrwParams {
    pub fn validate(&self) -> Result<()> {
        fn open_unit(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must lie in (0, 1), got {v}")))
            }
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(Error::param(format!(
                "inflation exponent r must exceed 1, got {}",
                self.r
            )));
        }
        if self.t_max == 0 {
            return Err(Error::param("t_max must be at least 1"));
        }
        // epsilon = 0 disables pruning; only used to compare against dense iteration.
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!(
                "epsilon must lie in [0, 1), got {}",
                self.epsilon
            )));
        }
        open_unit("xi", self.xi)?;
        open_unit("tau", self.tau)?;
        open_unit("eta", self.eta)?;
        if self.batch_size == Some(0) {
            return Err(Error::param("batch size must be at least 1"));
        }
        Ok(())
    }

    /// Batch size for a round with `remaining` unclustered vertices.
    pub fn batch_size_for(&self, remaining: usize) -> usize {
        self.batch_size
            .unwrap_or_else(|| remaining.div_ceil(100).max(1024))
    }
}

/// Result of one exploration.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub feature: SparseProbVector,
    pub iterations: usize,
    pub converged: bool,
    /// Largest support of any iterate, for checking the `1 / epsilon` bound.
    pub max_support: usize,
}

/// Removes entries below `epsilon` without renormalizing.
///
/// If every entry would be removed, the largest one is kept with value 1.
pub fn prune(x: &SparseProbVector, epsilon: f64) -> SparseProbVector {
    let kept: Vec<_> = x.iter().filter(|&(_, v)| v >= epsilon).collect();
    if kept.is_empty() {
        if let Some((v, _)) = x.argmax() {
            return SparseProbVector::point(v);
        }
    }
    SparseProbVector::from_sorted_unchecked(kept)
}

/// Raises each entry to the power `r` and rescales to unit L1 norm.
///
/// Panics on an empty vector.
pub fn inflate_normalize(x: &SparseProbVector, r: f64) -> SparseProbVector {
    assert!(!x.is_empty(), "cannot normalize an empty vector");
    let power = |v: f64| if r == 2.0 { v * v } else { v.powf(r) };
    let mut out: Vec<(VertexId, f64)> = x.iter().map(|(v, p)| (v, power(p))).collect();
    let mut total: f64 = out.iter().map(|&(_, p)| p).sum();
    if !(total > 0.0 && total.is_finite()) {
        // Everything underflowed; rescale by the maximum first.
        let max = x.argmax().map(|(_, m)| m).unwrap_or(1.0);
        for (slot, (_, p)) in out.iter_mut().zip(x.iter()) {
            slot.1 = power(p / max);
        }
        total = out.iter().map(|&(_, p)| p).sum();
    }
    for slot in &mut out {
        slot.1 /= total;
    }
    out.retain(|&(_, p)| p > 0.0);
    SparseProbVector::from_sorted_unchecked(out)
}

/// One transition `P x` with `P = (I + A)(I + D)^-1`.
pub fn walk_step(graph: &Graph, x: &SparseProbVector) -> SparseProbVector {
    Walker::new(graph, LrwParams::default()).step(x)
}

/// Runs the limited random walk from `seed`.
pub fn explore(graph: &Graph, seed: VertexId, params: &LrwParams) -> WalkOutcome {
    Walker::new(graph, *params).explore(seed)
}

/// Reusable exploration state for one graph.
///
/// Holds a dense accumulator sized to the graph so that repeated walks do
/// not reallocate. One `Walker` per worker thread.
#[derive(Debug)]
pub struct Walker<'g> {
    graph: &'g Graph,
    params: LrwParams,
    acc: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<VertexId>,
}

impl<'g> Walker<'g> {
    pub fn new(graph: &'g Graph, params: LrwParams) -> Self {
        let n = graph.vertex_count();
        Walker {
            graph,
            params,
            acc: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn params(&self) -> &LrwParams {
        &self.params
    }

    /// `P x`. Sources are visited in ascending vertex order so the floating
    /// point summation order is fixed.
    pub fn step(&mut self, x: &SparseProbVector) -> SparseProbVector {
        for (j, xj) in x.iter() {
            let nbrs = self.graph.neighbors(j);
            let share = xj * (1.0 / (1 + nbrs.len()) as f64);
            self.add(j, share);
            for &k in nbrs {
                self.add(k, share);
            }
        }
        let n = self.acc.len();
        let mut out = Vec::with_capacity(self.touched.len());
        if self.touched.len() * 8 > n {
            // Dense enough that a scan beats sorting.
            for i in 0..n {
                if self.seen[i] {
                    if self.acc[i] > 0.0 {
                        out.push((VertexId::from(i), self.acc[i]));
                    }
                    self.acc[i] = 0.0;
                    self.seen[i] = false;
                }
            }
        } else {
            self.touched.sort_unstable();
            for &v in &self.touched {
                let i = v.index();
                if self.acc[i] > 0.0 {
                    out.push((v, self.acc[i]));
                }
                self.acc[i] = 0.0;
                self.seen[i] = false;
            }
        }
        self.touched.clear();
        SparseProbVector::from_sorted_unchecked(out)
    }

    #[inline]
    fn add(&mut self, v: VertexId, amount: f64) {
        let i = v.index();
        if !self.seen[i] {
            self.seen[i] = true;
            self.touched.push(v);
        }
        self.acc[i] += amount;
    }

    /// One full iteration: transition, prune, inflate, normalize.
    pub fn iterate(&mut self, x: &SparseProbVector) -> SparseProbVector {
        let moved = self.step(x);
        let pruned = prune(&moved, self.params.epsilon);
        inflate_normalize(&pruned, self.params.r)
    }

    pub fn explore(&mut self, seed: VertexId) -> WalkOutcome {
        self.explore_with(seed, |_, _| {})
    }

    /// Like [`Walker::explore`], calling `observe(t, x_t)` after every
    /// iteration `t = 1, 2, ...`.
    pub fn explore_with<F>(&mut self, seed: VertexId, mut observe: F) -> WalkOutcome
    where
        F: FnMut(usize, &SparseProbVector),
    {
        assert!(
            seed.index() < self.graph.vertex_count(),
            "seed {seed} out of range"
        );
        let mut x = SparseProbVector::point(seed);
        let mut max_support = 1;
        for t in 1..=self.params.t_max {
            let next = self.iterate(&x);
            observe(t, &next);
            max_support = max_support.max(next.len());
            let delta = next.l2_distance(&x);
            x = next;
            if delta < self.params.xi {
                return WalkOutcome {
                    feature: x,
                    iterations: t,
                    converged: true,
                    max_support,
                };
            }
        }
        WalkOutcome {
            feature: x,
            iterations: self.params.t_max,
            converged: false,
            max_support,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spv(entries: &[(u32, f64)]) -> SparseProbVector {
        SparseProbVector::from_entries(entries.iter().map(|&(v, x)| (VertexId(v), x)).collect())
            .unwrap()
    }

    fn complete(n: u32) -> Graph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::from_edges(n as usize, edges)
    }

    #[test]
    fn step_on_isolated_and_path() {
        let g = Graph::from_edges(3, [(0, 1)]);
        assert_eq!(walk_step(&g, &spv(&[(2, 1.0)])), spv(&[(2, 1.0)]));
        assert_eq!(walk_step(&g, &spv(&[(0, 1.0)])), spv(&[(0, 0.5), (1, 0.5)]));
    }

    #[test]
    fn inflate_examples() {
        assert_eq!(
            inflate_normalize(&spv(&[(0, 0.5), (1, 0.5)]), 2.0),
            spv(&[(0, 0.5), (1, 0.5)])
        );
        assert_eq!(inflate_normalize(&spv(&[(3, 1.0)]), 1.7), spv(&[(3, 1.0)]));
        let y = inflate_normalize(&spv(&[(0, 0.8), (1, 0.2)]), 2.0);
        assert!((y.get(VertexId(0)) - 0.64 / 0.68).abs() < 1e-15);
        assert!((y.get(VertexId(1)) - 0.04 / 0.68).abs() < 1e-15);
        // general exponent path agrees with the fast path
        let z = inflate_normalize(&spv(&[(0, 0.8), (1, 0.2)]), 2.0 + 1e-12);
        assert!(z.l2_distance(&y) < 1e-9);
    }

    #[test]
    fn inflate_survives_underflow() {
        let y = inflate_normalize(&spv(&[(0, 1e-200), (1, 2e-200)]), 2.0);
        assert!((y.get(VertexId(0)) - 0.2).abs() < 1e-12);
        assert!((y.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn inflate_empty_panics() {
        inflate_normalize(&SparseProbVector::default(), 2.0);
    }

    #[test]
    fn prune_examples() {
        assert_eq!(prune(&spv(&[(0, 0.9), (1, 1e-7)]), 1e-5), spv(&[(0, 0.9)]));
        let x = spv(&[(0, 0.5), (4, 0.5)]);
        assert_eq!(prune(&x, 1e-5), x);
    }

    #[test]
    fn prune_keeps_largest_when_everything_is_small() {
        let n = 1_000_000u32;
        let mut entries: Vec<_> = (0..n).map(|v| (VertexId(v), 1e-6)).collect();
        entries[777_777].1 = 1.5e-6;
        let x = SparseProbVector::from_entries(entries).unwrap();
        assert_eq!(prune(&x, 1e-5), SparseProbVector::point(VertexId(777_777)));
        // exact tie keeps the smallest id
        let uniform =
            SparseProbVector::from_entries((0..n).map(|v| (VertexId(v), 1e-6)).collect()).unwrap();
        assert_eq!(prune(&uniform, 1e-5), SparseProbVector::point(VertexId(0)));
    }

    #[test]
    fn argmax_ties_pick_smallest_id() {
        assert_eq!(
            spv(&[(5, 0.25), (2, 0.25), (9, 0.5), (7, 0.5)]).argmax(),
            Some((VertexId(7), 0.5))
        );
    }

    #[test]
    fn l2_distance_over_union() {
        let a = spv(&[(0, 0.6), (2, 0.4)]);
        let b = spv(&[(1, 0.6), (2, 0.4)]);
        assert!((a.l2_distance(&b) - (0.72f64).sqrt()).abs() < 1e-15);
        assert_eq!(a.l2_distance(&a), 0.0);
        assert!((a.l2_distance(&SparseProbVector::default()) - (0.52f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn isolated_seed_converges_immediately() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2)]);
        let out = explore(&g, VertexId(3), &LrwParams::default());
        assert_eq!(out.feature, SparseProbVector::point(VertexId(3)));
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }

    #[test]
    fn complete_graph_walk_is_uniform() {
        let g = complete(4);
        for seed in g.vertices() {
            let out = explore(&g, seed, &LrwParams::default());
            assert!(out.converged);
            for v in g.vertices() {
                assert!((out.feature.get(v) - 0.25).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(LrwParams::default().validate().is_ok());
        let bad = [
            LrwParams {
                r: 1.0,
                ..Default::default()
            },
            LrwParams {
                t_max: 0,
                ..Default::default()
            },
            LrwParams {
                epsilon: 1.0,
                ..Default::default()
            },
            LrwParams {
                xi: 0.0,
                ..Default::default()
            },
            LrwParams {
                tau: 1.0,
                ..Default::default()
            },
            LrwParams {
                eta: 0.0,
                ..Default::default()
            },
            LrwParams {
                batch_size: Some(0),
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn default_batch_size() {
        let p = LrwParams::default();
        assert_eq!(p.batch_size_for(10), 1024);
        assert_eq!(p.batch_size_for(200_001), 2001);
    }

    #[test]
    fn from_entries_rejects_bad_values() {
        assert!(SparseProbVector::from_entries(vec![(VertexId(0), -0.1)]).is_err());
        assert!(SparseProbVector::from_entries(vec![(VertexId(0), f64::NAN)]).is_err());
        assert!(
            SparseProbVector::from_entries(vec![(VertexId(0), 0.5), (VertexId(0), 0.5)]).is_err()
        );
        assert_eq!(
            SparseProbVector::from_entries(vec![(VertexId(1), 0.0), (VertexId(0), 1.0)])
                .unwrap()
                .len(),
            1
        );
    }
}
