//! Structural risk minimization over the Lipschitz constant.
//!
//! For a given `L`, the conflict graph joins every pair of differently
//! labeled points with `L d < 2`. Removing a vertex cover leaves a subset on
//! which the Lipschitz extension interpolates the labels, so the smallest
//! number of margin violations at `L` is the minimum vertex cover size. A
//! maximal matching gives a factor-2 approximation `m(L)`, and the search
//! minimizes `Q(L) = m(L)/n + Delta(n, L, delta)` over the breakpoints
//! `2 / d(X_i, X_j)` where the graph changes.
//!
//! The greedy matching scans edges by increasing distance (ties by index
//! pair). Edges at a smaller `L` are a superset ordered the same way, so one
//! pass over the sorted pairs yields `m(L)` at every breakpoint, and `m` is
//! nonincreasing in `L`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::ann::NnMode;
use crate::bounds::{delta_combined_with, BoundParams, BoundValue, FatConstant, Penalty};
use crate::classifier::{consistent, LipschitzClassifier};
use crate::error::{invalid, Error, Result};
use crate::metric::{diameter, Metric, Sample};

/// A cross-label pair with its distance; `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub dist: f64,
}

fn by_distance(a: &Edge, b: &Edge) -> core::cmp::Ordering {
    a.dist.total_cmp(&b.dist).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j))
}

/// All differently labeled pairs, sorted by distance then index.
pub fn cross_label_pairs<M: Metric>(sample: &Sample, metric: &M) -> Vec<Edge> {
    let (pts, ys) = (sample.points(), sample.labels());
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if ys[i] != ys[j] {
                pairs.push(Edge {
                    i: i as u32,
                    j: j as u32,
                    dist: metric.dist(&pts[i], &pts[j]),
                });
            }
        }
    }
    pairs.sort_unstable_by(by_distance);
    pairs
}

/// The `k`-partite graph of pairs that violate `L d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictGraph {
    n: usize,
    labels: Vec<usize>,
    lipschitz: f64,
    /// Lexicographic by `(i, j)`.
    edges: Vec<Edge>,
}

impl ConflictGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertices touching at least one edge, ascending.
    pub fn conflicted_vertices(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for e in &self.edges {
            seen[e.i as usize] = true;
            seen[e.j as usize] = true;
        }
        (0..self.n).filter(|&v| seen[v]).collect()
    }

    pub fn is_cover(&self, cover: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &v in cover {
            inside[v] = true;
        }
        self.edges.iter().all(|e| inside[e.i as usize] || inside[e.j as usize])
    }
}

pub fn build_conflict_graph<M: Metric>(sample: &Sample, metric: &M, lipschitz: f64) -> Result<ConflictGraph> {
    if !(lipschitz > 0.0) {
        return Err(invalid("L", format!("{lipschitz} is not positive")));
    }
    let (pts, ys) = (sample.points(), sample.labels());
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if ys[i] == ys[j] {
                continue;
            }
            let dist = metric.dist(&pts[i], &pts[j]);
            if !consistent(lipschitz, dist) {
                edges.push(Edge {
                    i: i as u32,
                    j: j as u32,
                    dist,
                });
            }
        }
    }
    Ok(ConflictGraph {
        n: pts.len(),
        labels: ys.to_vec(),
        lipschitz,
        edges,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    Greedy2Approx,
    /// Greedy cover with redundant vertices dropped.
    PrunedGreedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    /// Ascending vertex ids.
    pub cover: Vec<usize>,
    pub size: usize,
    pub method: CoverMethod,
}

/// Order in which the greedy matching scans edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeOrder {
    /// Increasing distance, ties by `(i, j)`. Matches the SRM sweep.
    #[default]
    ByDistance,
    /// Lexicographic by `(i, j)`.
    Lexicographic,
}

/// Maximal-matching cover: take each still-uncovered edge in order and add
/// both endpoints. At most twice the minimum.
pub fn greedy_cover(g: &ConflictGraph) -> CoverResult {
    greedy_cover_ordered(g, EdgeOrder::ByDistance)
}

pub fn greedy_cover_ordered(g: &ConflictGraph, order: EdgeOrder) -> CoverResult {
    let mut edges = g.edges.clone();
    if order == EdgeOrder::ByDistance {
        edges.sort_unstable_by(by_distance);
    }
    let mut matched = vec![false; g.n];
    for e in &edges {
        let (i, j) = (e.i as usize, e.j as usize);
        if !matched[i] && !matched[j] {
            matched[i] = true;
            matched[j] = true;
        }
    }
    let cover: Vec<usize> = (0..g.n).filter(|&v| matched[v]).collect();
    CoverResult {
        size: cover.len(),
        cover,
        method: CoverMethod::Greedy2Approx,
    }
}

/// Drops, in ascending order, every cover vertex whose neighbors are all
/// still covered. The result is a minimal cover, never larger than the
/// input, and every vertex left in it has an uncovered neighbor. A cover of
/// all `n >= 1` vertices always loses at least one.
pub fn prune_cover(g: &ConflictGraph, cover: &[usize]) -> CoverResult {
    let mut inside = vec![false; g.n];
    for &v in cover {
        inside[v] = true;
    }
    prune_in_place(g.n, &g.edges, &mut inside);
    let cover: Vec<usize> = (0..g.n).filter(|&v| inside[v]).collect();
    CoverResult {
        size: cover.len(),
        cover,
        method: CoverMethod::PrunedGreedy,
    }
}

fn prune_in_place(n: usize, edges: &[Edge], inside: &mut [bool]) {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.i as usize].push(e.j);
        adj[e.j as usize].push(e.i);
    }
    for v in 0..n {
        if inside[v] && adj[v].iter().all(|&u| inside[u as usize]) {
            inside[v] = false;
        }
    }
}

/// Default bound on conflicted vertices for [`exact_cover`].
pub const EXACT_COVER_LIMIT: usize = 24;

/// Minimum vertex cover by branch and bound. Only for small graphs: at most
/// `limit` (and never more than 64) vertices may touch an edge.
pub fn exact_cover(g: &ConflictGraph, limit: usize) -> Result<CoverResult> {
    let verts = g.conflicted_vertices();
    if verts.len() > limit.min(64) {
        return Err(Error::CoverLimit {
            vertices: verts.len(),
            limit: limit.min(64),
        });
    }
    let mut slot = vec![usize::MAX; g.n];
    for (s, &v) in verts.iter().enumerate() {
        slot[v] = s;
    }
    let mut adj = vec![0u64; verts.len()];
    for e in &g.edges {
        let (a, b) = (slot[e.i as usize], slot[e.j as usize]);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let all = if verts.len() == 64 {
        u64::MAX
    } else {
        (1u64 << verts.len()) - 1
    };

    let greedy = greedy_cover(g);
    let mut best_mask = greedy.cover.iter().fold(0u64, |m, &v| m | 1 << slot[v]);
    let mut best = greedy.size;
    branch(&adj, all, 0, 0, &mut best, &mut best_mask);

    let cover: Vec<usize> = (0..verts.len())
        .filter(|&s| best_mask >> s & 1 == 1)
        .map(|s| verts[s])
        .collect();
    Ok(CoverResult {
        size: cover.len(),
        cover,
        method: CoverMethod::Exact,
    })
}

/// Size of a maximal matching among `active` vertices: a lower bound on the
/// cover still needed.
fn matching_bound(adj: &[u64], mut active: u64) -> usize {
    let mut size = 0;
    while active != 0 {
        let v = active.trailing_zeros() as usize;
        active &= !(1 << v);
        let nb = adj[v] & active;
        if nb != 0 {
            let u = nb.trailing_zeros();
            active &= !(1 << u);
            size += 1;
        }
    }
    size
}

fn branch(adj: &[u64], active: u64, chosen: u64, size: usize, best: &mut usize, best_mask: &mut u64) {
    let mut pick = None;
    let mut top = 0;
    let mut rest = active;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (adj[v] & active).count_ones();
        if deg > top {
            top = deg;
            pick = Some(v);
        }
    }
    let Some(v) = pick else {
        if size < *best {
            *best = size;
            *best_mask = chosen;
        }
        return;
    };
    if size + matching_bound(adj, active) >= *best {
        return;
    }
    let bit = 1u64 << v;
    branch(adj, active & !bit, chosen | bit, size + 1, best, best_mask);
    let nb = adj[v] & active;
    branch(
        adj,
        active & !bit & !nb,
        chosen | nb,
        size + nb.count_ones() as usize,
        best,
        best_mask,
    );
}

/// Smallest float `L >= 2/d` with `L d >= 2` in floating point.
pub fn breakpoint(dist: f64) -> f64 {
    let mut l = 2.0 / dist;
    while !consistent(l, dist) {
        l = l.next_up();
    }
    l
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidates {
    /// Ascending. Breakpoints plus one value below and one above them.
    pub values: Vec<f64>,
    /// Cross-label pairs at distance 0; they conflict at every `L`.
    pub always_conflicting: Vec<(usize, usize)>,
}

fn candidates_from_pairs(pairs: &[Edge], diam: f64) -> Result<Candidates> {
    let always_conflicting: Vec<(usize, usize)> = pairs
        .iter()
        .take_while(|e| e.dist == 0.0)
        .map(|e| (e.i as usize, e.j as usize))
        .collect();
    let mut values: Vec<f64> = pairs
        .iter()
        .filter(|e| e.dist > 0.0)
        .map(|e| breakpoint(e.dist))
        .collect();
    values.reverse();
    values.dedup();
    match (values.first().copied(), values.last().copied()) {
        (Some(lo), Some(hi)) => {
            values.insert(0, lo / 2.0);
            values.push(hi * 2.0);
        }
        _ => {
            if !(diam > 0.0) {
                return Err(Error::DegenerateDiameter);
            }
            values.push(breakpoint(diam));
        }
    }
    Ok(Candidates {
        values,
        always_conflicting,
    })
}

/// Lipschitz constants where the conflict graph changes.
///
/// Without any positive-distance cross-label pair the only candidate is the
/// breakpoint of the sample diameter.
pub fn candidate_l_values<M: Metric>(sample: &Sample, metric: &M) -> Result<Candidates> {
    let pairs = cross_label_pairs(sample, metric);
    let diam = if pairs.iter().any(|e| e.dist > 0.0) {
        0.0
    } else {
        diameter(sample.points(), metric)
    };
    candidates_from_pairs(&pairs, diam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every candidate.
    #[default]
    Sweep,
    /// Golden-section bracketing over candidate positions.
    Binary,
}

/// Units of the SRM objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QUnits {
    /// `m/n + Delta`
    #[default]
    Risk,
    /// `m + Delta`
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrmOptions {
    pub delta: f64,
    pub ddim: f64,
    pub search: SearchMode,
    pub penalty: Penalty,
    pub units: QUnits,
    pub fat_constant: FatConstant,
    pub nn_mode: NnMode,
}

impl Default for SrmOptions {
    fn default() -> Self {
        Self {
            delta: 0.01,
            ddim: 1.0,
            search: SearchMode::Sweep,
            penalty: Penalty::Combined,
            units: QUnits::Risk,
            fat_constant: FatConstant::Printed,
            nn_mode: NnMode::Exact,
        }
    }
}

impl SrmOptions {
    fn base_params(&self, sample: &Sample) -> Result<BoundParams> {
        BoundParams::new(sample.len() as u64, 1.0, self.ddim, sample.k() as u64, self.delta)?
            .with_eta(self.nn_mode.eta())
    }

    /// Objective and bound at `L` with `violations` removed points.
    pub fn objective(&self, base: &BoundParams, lipschitz: f64, violations: usize) -> Result<(f64, BoundValue)> {
        let bound = delta_combined_with(&base.with_lipschitz(lipschitz)?, self.fat_constant);
        let empirical = match self.units {
            QUnits::Risk => violations as f64 / base.n as f64,
            QUnits::Count => violations as f64,
        };
        Ok((empirical + bound.penalty(self.penalty), bound))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub lipschitz: f64,
    pub violations: usize,
    pub penalty: f64,
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct SrmResult<M> {
    pub lipschitz: f64,
    pub cover: CoverResult,
    pub q_value: f64,
    /// Indices of the consistent subset, ascending.
    pub s1: Vec<usize>,
    pub bound: BoundValue,
    /// Ascending in `L`.
    pub candidates_examined: Vec<CandidateRow>,
    pub always_conflicting: Vec<(usize, usize)>,
    pub classifier: LipschitzClassifier<M>,
}

/// Incremental maximal matching over pairs sorted by distance.
struct Matching<'a> {
    pairs: &'a [Edge],
    matched: Vec<bool>,
    size: usize,
    next: usize,
}

impl<'a> Matching<'a> {
    fn new(pairs: &'a [Edge], n: usize) -> Self {
        Self {
            pairs,
            matched: vec![false; n],
            size: 0,
            next: 0,
        }
    }

    /// Inserts every pair that conflicts at `lipschitz`; calls must come
    /// with nonincreasing `lipschitz`.
    fn grow_to(&mut self, lipschitz: f64) {
        while let Some(e) = self.pairs.get(self.next) {
            if consistent(lipschitz, e.dist) {
                break;
            }
            let (i, j) = (e.i as usize, e.j as usize);
            if !self.matched[i] && !self.matched[j] {
                self.matched[i] = true;
                self.matched[j] = true;
                self.size += 2;
            }
            self.next += 1;
        }
    }
}

fn check_training_sample(sample: &Sample) -> Result<()> {
    if sample.len() < 2 {
        return Err(Error::InvalidSample(format!(
            "{} points; at least 2 required",
            sample.len()
        )));
    }
    if sample.k() < 2 {
        return Err(Error::InvalidSample(format!(
            "{} label; at least 2 required",
            sample.k()
        )));
    }
    Ok(())
}

/// Chooses `L`, removes a greedy cover and fits the classifier on the rest.
pub fn srm_train<M: Metric + Clone>(sample: &Sample, metric: &M, opts: &SrmOptions) -> Result<SrmResult<M>> {
    check_training_sample(sample)?;
    sample.validate_with(metric)?;
    let n = sample.len();
    let base = opts.base_params(sample)?;
    let pairs = cross_label_pairs(sample, metric);
    let diam = if pairs.iter().any(|e| e.dist > 0.0) {
        0.0
    } else {
        diameter(sample.points(), metric)
    };
    let cands = candidates_from_pairs(&pairs, diam)?;
    let values = &cands.values;

    let row = |lipschitz: f64, violations: usize| -> Result<CandidateRow> {
        let (q, bound) = opts.objective(&base, lipschitz, violations)?;
        Ok(CandidateRow {
            lipschitz,
            violations,
            penalty: bound.penalty(opts.penalty),
            q,
        })
    };

    let rows: Vec<CandidateRow> = match opts.search {
        SearchMode::Sweep => {
            let mut m = Matching::new(&pairs, n);
            let mut rows = Vec::with_capacity(values.len());
            for &l in values.iter().rev() {
                m.grow_to(l);
                rows.push(row(l, m.size)?);
            }
            rows.reverse();
            rows
        }
        SearchMode::Binary => {
            let mut memo: Vec<Option<CandidateRow>> = vec![None; values.len()];
            let mut eval = |pos: usize| -> Result<f64> {
                if memo[pos].is_none() {
                    let mut m = Matching::new(&pairs, n);
                    m.grow_to(values[pos]);
                    memo[pos] = Some(row(values[pos], m.size)?);
                }
                Ok(memo[pos].expect("just filled").q)
            };
            let (mut lo, mut hi) = (0usize, values.len() - 1);
            while hi - lo > 2 {
                let step = (hi - lo) * 382 / 1000;
                let step = step.max(1);
                let (a, b) = (lo + step, hi - step);
                let (a, b) = if a < b {
                    (a, b)
                } else {
                    (lo + (hi - lo) / 2, lo + (hi - lo) / 2 + 1)
                };
                if eval(a)? <= eval(b)? {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            for pos in lo..=hi {
                eval(pos)?;
            }
            memo.into_iter().flatten().collect()
        }
    };

    let chosen = rows
        .iter()
        .min_by(|a, b| a.q.total_cmp(&b.q).then(a.lipschitz.total_cmp(&b.lipschitz)))
        .copied()
        .expect("at least one candidate");

    let mut m = Matching::new(&pairs, n);
    m.grow_to(chosen.lipschitz);
    let mut inside = m.matched;
    prune_in_place(n, &pairs[..m.next], &mut inside);
    let cover: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
    let s1: Vec<usize> = (0..n).filter(|&i| !inside[i]).collect();
    let classifier = LipschitzClassifier::new(
        s1.iter().map(|&i| sample.point(i).clone()).collect(),
        s1.iter().map(|&i| sample.label(i)).collect(),
        sample.k(),
        chosen.lipschitz,
        metric.clone(),
        opts.nn_mode,
    )?;
    let (q_value, bound) = opts.objective(&base, chosen.lipschitz, cover.len())?;
    Ok(SrmResult {
        lipschitz: chosen.lipschitz,
        cover: CoverResult {
            size: cover.len(),
            cover,
            method: CoverMethod::PrunedGreedy,
        },
        q_value,
        s1,
        bound,
        candidates_examined: rows,
        always_conflicting: cands.always_conflicting,
        classifier,
    })
}

/// The objective with exact covers at every candidate: `(L*, m(L*), Q*)`.
/// Exponential in the conflicted vertex count; for checking small samples.
pub fn exact_sweep<M: Metric>(
    sample: &Sample,
    metric: &M,
    opts: &SrmOptions,
    limit: usize,
) -> Result<(f64, usize, f64)> {
    check_training_sample(sample)?;
    let base = opts.base_params(sample)?;
    let cands = candidate_l_values(sample, metric)?;
    let mut best: Option<(f64, usize, f64)> = None;
    for &l in &cands.values {
        let g = build_conflict_graph(sample, metric, l)?;
        let size = exact_cover(&g, limit)?.size;
        let (q, _) = opts.objective(&base, l, size)?;
        if best.is_none_or(|b| q < b.2) {
            best = Some((l, size, q));
        }
    }
    Ok(best.expect("at least one candidate"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MetricKind, MetricOracle, Point};

    fn line_sample(xs: &[f64], ys: &[usize]) -> Sample {
        Sample::new(xs.iter().map(|&x| Point::scalar(x)).collect(), ys.to_vec()).unwrap()
    }

    fn l1() -> MetricOracle {
        MetricOracle::new(MetricKind::L1)
    }

    fn graph(n: usize, edges: &[(u32, u32)]) -> ConflictGraph {
        ConflictGraph {
            n,
            labels: (0..n).collect(),
            lipschitz: 1.0,
            edges: edges.iter().map(|&(i, j)| Edge { i, j, dist: 0.5 }).collect(),
        }
    }

    #[test]
    fn edge_examples() {
        let s = line_sample(&[0.0, 1.5], &[0, 1]);
        assert_eq!(build_conflict_graph(&s, &l1(), 1.0).unwrap().edges().len(), 1);
        let s = line_sample(&[0.0, 1.0], &[0, 1]);
        assert!(build_conflict_graph(&s, &l1(), 2.0).unwrap().edges().is_empty());
        let s = line_sample(&[0.0, 0.0, 1e-9], &[0, 0, 0]);
        assert!(build_conflict_graph(&s, &l1(), 1e6).unwrap().edges().is_empty());
        assert!(build_conflict_graph(&s, &l1(), 0.0).is_err());
    }

    #[test]
    fn greedy_examples() {
        let g = graph(3, &[]);
        assert_eq!(greedy_cover(&g).size, 0);
        let g = graph(2, &[(0, 1)]);
        assert_eq!(greedy_cover(&g).cover, vec![0, 1]);
        assert_eq!(exact_cover(&g, 24).unwrap().size, 1);
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(greedy_cover(&g).size, 2);
        assert_eq!(exact_cover(&g, 24).unwrap().size, 2);
    }

    #[test]
    fn lexicographic_order() {
        // path 0-1-2-3: lexicographic picks (0,1) then (2,3)
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = greedy_cover_ordered(&g, EdgeOrder::Lexicographic);
        assert_eq!(c.cover, vec![0, 1, 2, 3]);
        assert!(g.is_cover(&c.cover));
    }

    #[test]
    fn star_has_hub_cover() {
        let edges: Vec<(u32, u32)> = (1..=8).map(|j| (0, j)).collect();
        let g = graph(9, &edges);
        let c = exact_cover(&g, 24).unwrap();
        assert_eq!(c.cover, vec![0]);
    }

    #[test]
    fn exact_cover_limit() {
        let edges: Vec<(u32, u32)> = (0..13).map(|i| (2 * i, 2 * i + 1)).collect();
        let g = graph(26, &edges);
        assert!(matches!(
            exact_cover(&g, 24),
            Err(Error::CoverLimit { vertices: 26, .. })
        ));
        assert_eq!(exact_cover(&g, 26).unwrap().size, 13);
    }

    #[test]
    fn candidates_single_pair() {
        let s = line_sample(&[0.0, 1.0], &[0, 1]);
        let c = candidate_l_values(&s, &l1()).unwrap();
        assert_eq!(c.values, vec![1.0, 2.0, 4.0]);
        assert!(c.always_conflicting.is_empty());
    }

    #[test]
    fn candidates_single_label() {
        let s = line_sample(&[0.0, 0.5, 1.0], &[0, 0, 0]);
        let c = candidate_l_values(&s, &l1()).unwrap();
        assert_eq!(c.values, vec![2.0]);
    }

    #[test]
    fn breakpoints_are_consistent() {
        for d in [0.1, 0.3, 1.0 / 3.0, 0.7, 0.123456789, 1e-7] {
            let l = breakpoint(d);
            assert!(consistent(l, d));
            assert!(l <= 2.0 / d * (1.0 + 1e-15));
        }
    }

    #[test]
    fn separable_pair_trains_at_two() {
        let s = line_sample(&[0.0, 1.0], &[0, 1]);
        let r = srm_train(&s, &l1(), &SrmOptions::default()).unwrap();
        let rows = &r.candidates_examined;
        assert_eq!(
            rows.iter().map(|c| c.lipschitz).collect::<Vec<_>>(),
            vec![1.0, 2.0, 4.0]
        );
        assert_eq!(rows.iter().map(|c| c.violations).collect::<Vec<_>>(), vec![2, 0, 0]);
        // With n = 2 the penalty grows faster in L than the cost of dropping
        // a point: the objective prefers L = 1 with one point removed over
        // the separating L = 2.
        let exact = exact_sweep(&s, &l1(), &SrmOptions::default(), EXACT_COVER_LIMIT).unwrap();
        assert_eq!((exact.0, exact.1), (1.0, 1));
        assert!(exact.2 < rows[1].q);
        assert_eq!(r.lipschitz, 1.0);
        assert_eq!(r.cover.cover, vec![1]);
        assert_eq!(r.s1, vec![0]);
        assert_eq!(r.q_value, exact.2);
    }

    #[test]
    fn duplicated_cross_pair_always_covered() {
        let s = line_sample(&[0.0, 0.0, 1.0, 0.6], &[0, 1, 1, 0]);
        let r = srm_train(&s, &l1(), &SrmOptions::default()).unwrap();
        assert_eq!(r.always_conflicting, vec![(0, 1)]);
        assert!(r.candidates_examined.iter().all(|row| row.violations >= 1));
        assert!(r.cover.cover.contains(&0) || r.cover.cover.contains(&1));
    }

    #[test]
    fn matching_that_covers_everything_is_pruned() {
        // the matching takes both twins of every duplicated pair
        let s = line_sample(&[0.0, 0.0, 1.0, 1.0], &[0, 1, 0, 1]);
        let r = srm_train(&s, &l1(), &SrmOptions::default()).unwrap();
        assert!(r.candidates_examined.iter().all(|c| c.violations == 4));
        assert_eq!(r.cover.cover, vec![1, 3]);
        assert_eq!(r.s1, vec![0, 2]);
        let s = line_sample(&[0.5, 0.5], &[0, 1]);
        assert_eq!(
            srm_train(&s, &l1(), &SrmOptions::default()).unwrap_err(),
            Error::DegenerateDiameter
        );
    }

    #[test]
    fn training_preconditions() {
        let s = line_sample(&[0.0, 1.0], &[0, 0]);
        assert!(srm_train(&s, &l1(), &SrmOptions::default()).is_err());
        let s = line_sample(&[0.0], &[0]);
        assert!(srm_train(&s, &l1(), &SrmOptions::default()).is_err());
    }

    #[test]
    fn count_units_literal_objective() {
        let s = line_sample(&[0.0, 0.1, 0.2, 1.0], &[0, 1, 0, 1]);
        let opts = SrmOptions {
            units: QUnits::Count,
            ..SrmOptions::default()
        };
        let r = srm_train(&s, &l1(), &opts).unwrap();
        for row in &r.candidates_examined {
            assert!((row.q - (row.violations as f64 + row.penalty)).abs() < 1e-12);
        }
    }
}
