//! Exact and `(1+eta)`-approximate nearest-neighbor search.
//!
//! The approximate index is a hierarchy of nested nets. Level `m` has radius
//! `r_m = 2^(top - m)`, where `2^top` bounds the distance from the first
//! point to every other point. The level-`m` net `N_m` contains every point
//! whose insertion level is at most `m`; it packs (centers pairwise farther
//! than `r_m`) and covers (every point within `r_m` of some center). A point
//! inserted at level `m + 1` hangs off a parent in `N_m` at distance at most
//! `r_m`, so everything below a node seen at level `m` lies within `2 r_m` of
//! it. Queries descend level by level and drop a node once no point under it
//! can beat the running best by more than the factor `1 + eta`.
//!
//! Points at distance zero from an earlier point never become centers; they
//! are attached to that center as duplicates.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::{Metric, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum NnMode {
    Exact,
    Approximate { eta: f64 },
}

impl NnMode {
    pub fn eta(self) -> f64 {
        match self {
            NnMode::Exact => 0.0,
            NnMode::Approximate { eta } => eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnAnswer {
    /// Position in the indexed point list.
    pub index: usize,
    pub label: usize,
    /// Distance from the query to the returned point.
    pub dist: f64,
}

const DUPLICATE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct NetTree {
    top: i32,
    max_level: u32,
    /// Insertion level, or `DUPLICATE`.
    level: Vec<u32>,
    /// Parent center; for duplicates the center they coincide with.
    parent: Vec<u32>,
    /// `(insertion level, child)` sorted by level.
    children: Vec<Vec<(u32, u32)>>,
    dups: Vec<Vec<u32>>,
    /// Labels present under each node, as a bitset of `words` words.
    masks: Vec<u64>,
    words: usize,
}

impl NetTree {
    fn radius(&self, m: u32) -> f64 {
        libm::scalbn(1.0, self.top - m as i32)
    }

    fn children_at(&self, q: u32, m: u32) -> &[(u32, u32)] {
        let ch = &self.children[q as usize];
        let lo = ch.partition_point(|&(l, _)| l < m);
        let hi = ch.partition_point(|&(l, _)| l <= m);
        &ch[lo..hi]
    }

    fn has_children_after(&self, q: u32, m: u32) -> bool {
        self.children[q as usize].last().is_some_and(|&(l, _)| l > m)
    }

    fn has_label(&self, q: u32, y: usize) -> bool {
        self.masks[q as usize * self.words + y / 64] & (1u64 << (y % 64)) != 0
    }

    fn build<M: Metric>(points: &[Point], labels: &[usize], k: usize, metric: &M) -> Self {
        let n = points.len();
        let mut level = vec![DUPLICATE; n];
        let mut parent = vec![0u32; n];
        let mut children: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut dups: Vec<Vec<u32>> = vec![Vec::new(); n];
        level[0] = 0;

        let root_dist: Vec<f64> = points.iter().map(|p| metric.dist(&points[0], p)).collect();
        let far = root_dist[1..].iter().copied().fold(0.0f64, f64::max);
        let top = if far > 0.0 {
            let mut e = libm::ceil(libm::log2(far)) as i32;
            while libm::scalbn(1.0, e) < far {
                e += 1;
            }
            e
        } else {
            0
        };
        let radius = |m: u32| libm::scalbn(1.0, top - m as i32);

        // Candidate lists: level-m centers within 4 r_m of each pending point.
        let mut pending: Vec<u32> = Vec::new();
        let mut near: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for i in 1..n {
            if root_dist[i] == 0.0 {
                level[i] = DUPLICATE;
                parent[i] = 0;
                dups[0].push(i as u32);
            } else {
                pending.push(i as u32);
                near[i].push((0, root_dist[i]));
            }
        }

        let mut m = 0u32;
        let mut max_level = 0u32;
        while !pending.is_empty() {
            let next = m + 1;
            let r_next = radius(next);
            let mut still = Vec::with_capacity(pending.len());
            for &p in &pending {
                let pi = p as usize;
                let mut covered = false;
                let mut dup_of = None;
                for &(q, dq) in &near[pi] {
                    if dq == 0.0 {
                        dup_of = Some(q);
                        break;
                    }
                    covered |= dq <= r_next;
                    for &(_, c) in children_at_level(&children, q, next) {
                        let dc = metric.dist(&points[c as usize], &points[pi]);
                        if dc == 0.0 {
                            dup_of = Some(c);
                            break;
                        }
                        covered |= dc <= r_next;
                    }
                    if dup_of.is_some() {
                        break;
                    }
                }
                if let Some(c) = dup_of {
                    parent[pi] = c;
                    dups[c as usize].push(p);
                } else if covered {
                    still.push(p);
                } else {
                    let &(q, _) = near[pi]
                        .iter()
                        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                        .expect("candidate list is never empty");
                    level[pi] = next;
                    parent[pi] = q;
                    children[q as usize].push((next, p));
                    max_level = next;
                }
            }
            let reach = 4.0 * r_next;
            for &p in &still {
                let pi = p as usize;
                let old = core::mem::take(&mut near[pi]);
                let mut fresh = Vec::with_capacity(old.len());
                for &(q, dq) in &old {
                    if dq <= reach {
                        fresh.push((q, dq));
                    }
                    for &(_, c) in children_at_level(&children, q, next) {
                        let dc = metric.dist(&points[c as usize], &points[pi]);
                        if dc <= reach {
                            fresh.push((c, dc));
                        }
                    }
                }
                near[pi] = fresh;
            }
            pending = still;
            m = next;
        }

        let words = k.div_ceil(64).max(1);
        let mut masks = vec![0u64; n * words];
        let mut order: Vec<u32> = (0..n as u32).filter(|&i| level[i as usize] != DUPLICATE).collect();
        order.sort_by(|a, b| level[*b as usize].cmp(&level[*a as usize]));
        for &c in &order {
            let ci = c as usize;
            for &i in core::iter::once(&c).chain(dups[ci].iter()) {
                let y = labels[i as usize];
                masks[ci * words + y / 64] |= 1u64 << (y % 64);
            }
            if ci != 0 {
                let pi = parent[ci] as usize;
                for w in 0..words {
                    masks[pi * words + w] |= masks[ci * words + w];
                }
            }
        }

        NetTree {
            top,
            max_level,
            level,
            parent,
            children,
            dups,
            masks,
            words,
        }
    }
}

fn children_at_level(children: &[Vec<(u32, u32)>], q: u32, m: u32) -> &[(u32, u32)] {
    let ch = &children[q as usize];
    let lo = ch.partition_point(|&(l, _)| l < m);
    &ch[lo..]
}

/// Nearest-neighbor index over a labeled point set.
#[derive(Debug, Clone)]
pub struct NnIndex<M> {
    metric: M,
    points: Vec<Point>,
    labels: Vec<usize>,
    k: usize,
    mode: NnMode,
    tree: Option<NetTree>,
}

impl<M: Metric> NnIndex<M> {
    /// Builds an index. `k` is the size of the label space; labels must be
    /// below it.
    pub fn build(points: Vec<Point>, labels: Vec<usize>, k: usize, metric: M, mode: NnMode) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        if points.len() != labels.len() {
            return Err(Error::InvalidSample(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.len() >= DUPLICATE as usize {
            return Err(invalid("points", "too many points for the index"));
        }
        if let Some(&y) = labels.iter().find(|&&y| y >= k) {
            return Err(Error::UnknownLabel(y));
        }
        for p in &points {
            metric.validate(p)?;
            points[0].compatible_with(p)?;
        }
        let tree = match mode {
            NnMode::Exact => None,
            NnMode::Approximate { eta } => {
                if !(eta >= 0.0 && eta.is_finite()) {
                    return Err(invalid("eta", format!("{eta} is not a nonnegative real")));
                }
                Some(NetTree::build(&points, &labels, k, &metric))
            }
        };
        Ok(Self {
            metric,
            points,
            labels,
            k,
            mode,
            tree,
        })
    }

    pub fn mode(&self) -> NnMode {
        self.mode
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Checks that `x` can be compared with the indexed points.
    pub fn check_query(&self, x: &Point) -> Result<()> {
        self.metric.validate(x)?;
        self.points[0].compatible_with(x)
    }

    /// Nearest point; ties go to the lowest stored position.
    pub fn query(&self, x: &Point) -> NnAnswer {
        let (dist, index) = match &self.tree {
            None => self.scan(x, None),
            Some(tree) => self.descend(tree, x, None),
        };
        NnAnswer {
            index,
            label: self.labels[index],
            dist,
        }
    }

    /// Nearest point of each label, indexed by label id. Labels without
    /// indexed points map to `None`.
    pub fn query_per_label(&self, x: &Point) -> Vec<Option<NnAnswer>> {
        match &self.tree {
            None => {
                let mut best: Vec<Option<NnAnswer>> = vec![None; self.k];
                for (i, p) in self.points.iter().enumerate() {
                    let d = self.metric.dist(x, p);
                    let y = self.labels[i];
                    if best[y].is_none_or(|b| d < b.dist) {
                        best[y] = Some(NnAnswer {
                            index: i,
                            label: y,
                            dist: d,
                        });
                    }
                }
                best
            }
            Some(tree) => (0..self.k)
                .map(|y| {
                    if !tree.has_label(0, y) {
                        return None;
                    }
                    let (dist, index) = self.descend(tree, x, Some(y));
                    Some(NnAnswer { index, label: y, dist })
                })
                .collect(),
        }
    }

    fn scan(&self, x: &Point, filter: Option<usize>) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, p) in self.points.iter().enumerate() {
            if filter.is_some_and(|y| self.labels[i] != y) {
                continue;
            }
            let d = self.metric.dist(x, p);
            if d < best.0 || best.1 == usize::MAX {
                best = (d, i);
            }
        }
        best
    }

    fn descend(&self, tree: &NetTree, x: &Point, filter: Option<usize>) -> (f64, usize) {
        let slack = 1.0 + self.mode.eta();
        let mut best = (f64::INFINITY, usize::MAX);
        let offer = |c: u32, dc: f64, best: &mut (f64, usize)| {
            let ci = c as usize;
            let hit = core::iter::once(ci)
                .chain(tree.dups[ci].iter().map(|&i| i as usize))
                .filter(|&i| filter.is_none_or(|y| self.labels[i] == y))
                .min();
            if let Some(i) = hit {
                if dc < best.0 || (dc == best.0 && i < best.1) || best.1 == usize::MAX {
                    *best = (dc, i);
                }
            }
        };

        let d0 = self.metric.dist(x, &self.points[0]);
        offer(0, d0, &mut best);
        let mut frontier: Vec<(u32, f64)> = vec![(0, d0)];
        let mut next: Vec<(u32, f64)> = Vec::new();
        let mut m = 0u32;
        while !frontier.is_empty() && m < tree.max_level {
            let lvl = m + 1;
            next.clear();
            for &(q, dq) in &frontier {
                next.push((q, dq));
                for &(_, c) in tree.children_at(q, lvl) {
                    let dc = self.metric.dist(x, &self.points[c as usize]);
                    offer(c, dc, &mut best);
                    next.push((c, dc));
                }
            }
            // Everything still hanging below a node at level `lvl` is within
            // 2 r_lvl of it; the factors absorb rounding in the distances.
            let reach = 2.0 * tree.radius(lvl) * (1.0 + 1e-12);
            let threshold = best.0 / slack;
            frontier.clear();
            frontier.extend(next.iter().copied().filter(|&(c, dc)| {
                tree.has_children_after(c, lvl)
                    && filter.is_none_or(|y| tree.has_label(c, y))
                    && dc * (1.0 - 1e-12) - reach <= threshold
            }));
            m = lvl;
        }
        best
    }

    /// Net levels present in the approximate structure (0 for exact mode).
    pub fn levels(&self) -> usize {
        self.tree.as_ref().map_or(0, |t| t.max_level as usize + 1)
    }

    /// Radius of net level `m`.
    pub fn radius(&self, m: usize) -> Option<f64> {
        self.tree.as_ref().map(|t| t.radius(m as u32))
    }

    /// Centers of net level `m`, in stored order.
    pub fn net(&self, m: usize) -> Vec<usize> {
        match &self.tree {
            None => Vec::new(),
            Some(t) => (0..self.points.len())
                .filter(|&i| t.level[i] != DUPLICATE && t.level[i] as usize <= m)
                .collect(),
        }
    }

    /// Verifies packing, covering and parent distances at every level.
    pub fn check_net_invariants(&self) -> core::result::Result<(), String> {
        let Some(tree) = &self.tree else {
            return Ok(());
        };
        let n = self.points.len();
        for i in 1..n {
            let p = tree.parent[i] as usize;
            let d = self.metric.dist(&self.points[i], &self.points[p]);
            if tree.level[i] == DUPLICATE {
                if d != 0.0 || tree.level[p] == DUPLICATE || p > i {
                    return Err(format!("duplicate {i} badly attached to {p}"));
                }
            } else {
                if tree.level[i] == 0 {
                    return Err(format!("point {i} shares the root level"));
                }
                let r = tree.radius(tree.level[i] - 1);
                if tree.level[p] >= tree.level[i] || d > r {
                    return Err(format!("parent of {i} at distance {d} exceeds {r}"));
                }
            }
        }
        for m in 0..=tree.max_level {
            let r = tree.radius(m);
            let centers = self.net(m as usize);
            for (a, &i) in centers.iter().enumerate() {
                for &j in &centers[a + 1..] {
                    let d = self.metric.dist(&self.points[i], &self.points[j]);
                    if d <= r {
                        return Err(format!("packing: level {m} centers {i},{j} at {d} <= {r}"));
                    }
                }
            }
            for i in 0..n {
                let covered = centers
                    .iter()
                    .any(|&c| self.metric.dist(&self.points[i], &self.points[c]) <= r);
                if !covered {
                    return Err(format!("covering: point {i} uncovered at level {m}"));
                }
            }
        }
        if self.net(tree.max_level as usize).len() + tree.dups.iter().map(Vec::len).sum::<usize>() != n {
            return Err(String::from("finest level does not hold every point"));
        }
        Ok(())
    }
}
