//! Scores, margins and the truncated Lipschitz-extension classifier.
//!
//! For a consistent subset `S1` and Lipschitz constant `L`, the hypothesis
//! is evaluated in the split truncated form
//!
//! ```text
//! h(x, y) = T(min_i { xi(Y_i, y) + L d(X_i, x) }) / 2
//!         + T(max_i { xi(Y_i, y) - L d(X_i, x) }) / 2
//! ```
//!
//! with `T` clipping to `[-1, 1]` and `xi(y, y') = +1` when the labels agree,
//! `-1` otherwise. Because `xi` is two-valued, each optimum only needs two
//! numbers: the distance to the nearest `S1` point labeled `y` and the
//! distance to the nearest `S1` point with any other label.

use alloc::format;
use alloc::vec::Vec;

use crate::ann::{NnIndex, NnMode};
use crate::error::{invalid, Error, Result};
use crate::metric::{Metric, Point, Sample};

/// `max(lo, min(hi, z))`.
pub fn truncate(lo: f64, hi: f64, z: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::TruncationBounds { lo, hi });
    }
    Ok(z.min(hi).max(lo))
}

#[inline]
fn clip(z: f64) -> f64 {
    z.min(1.0).max(-1.0)
}

/// `+1` for equal labels, `-1` otherwise.
#[inline]
pub fn xi(y: usize, y2: usize) -> f64 {
    if y == y2 {
        1.0
    } else {
        -1.0
    }
}

/// The pair-consistency relation: two differently labeled points can both
/// receive `h = 1` only if `L d >= 2`. Conflict graphs and the classifier
/// certificate share this predicate.
#[inline]
pub fn consistent(lipschitz: f64, dist: f64) -> bool {
    lipschitz * dist >= 2.0
}

/// Per-label scores `f(x, y)` for one query point.
///
/// Entries may be `-inf` (a label with no support), never `NaN` or `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable(Vec<f64>);

impl ScoreTable {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(invalid("scores", "no labels"));
        }
        if scores.iter().any(|s| s.is_nan() || *s == f64::INFINITY) {
            return Err(invalid("scores", "NaN or +inf score"));
        }
        Ok(Self(scores))
    }

    pub fn scores(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, y: usize) -> Option<f64> {
        self.0.get(y).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    /// `raw` clipped to `[-1, 1]`.
    pub value: f64,
    pub raw: f64,
}

/// Half the gap between the score of `y` and the best competing score.
///
/// With a single label the competing supremum is over the empty set, taken
/// as `-inf`, so `raw = +inf` and `value = 1`.
pub fn margin(scores: &ScoreTable, y: usize) -> Result<Margin> {
    let own = scores.get(y).ok_or(Error::UnknownLabel(y))?;
    let rival = scores
        .scores()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != y)
        .map(|(_, &s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let raw = if rival == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        0.5 * (own - rival)
    };
    Ok(Margin { value: clip(raw), raw })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// `1{u < 1}`
    Cutoff,
    /// `T_0^1(1 - u)`
    Margin,
    /// Misclassification of the induced classifier.
    ZeroOne,
}

/// Cutoff or margin loss of a hypothesis value `u = h(x, y)`.
pub fn surrogate_loss(loss: Loss, u: f64) -> Result<f64> {
    match loss {
        Loss::Cutoff => Ok(if u < 1.0 { 1.0 } else { 0.0 }),
        Loss::Margin => Ok((1.0 - u).min(1.0).max(0.0)),
        Loss::ZeroOne => Err(invalid("loss", "zero-one loss needs the classifier, not a value")),
    }
}

fn split_form(lipschitz: f64, same: f64, other: f64) -> (f64, f64) {
    let lo = (1.0 + lipschitz * same).min(-1.0 + lipschitz * other);
    let hi = (1.0 - lipschitz * same).max(-1.0 - lipschitz * other);
    (lo, hi)
}

fn nearest_other(dists: &[f64], y: usize) -> f64 {
    dists
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != y)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min)
}

/// `h(x, y)` in the split truncated form, from per-label nearest distances.
pub fn h_from_distances(lipschitz: f64, dists: &[f64], y: usize) -> f64 {
    let (lo, hi) = split_form(lipschitz, dists[y], nearest_other(dists, y));
    0.5 * clip(lo) + 0.5 * clip(hi)
}

/// The untruncated extension `(min + max) / 2`, from per-label distances.
pub fn h_raw_from_distances(lipschitz: f64, dists: &[f64], y: usize) -> f64 {
    let (lo, hi) = split_form(lipschitz, dists[y], nearest_other(dists, y));
    0.5 * (lo + hi)
}

/// Arg-max of `values`; ties go to the smaller `dists` entry, then to the
/// lower label id.
fn argmax_by_value_then_distance(values: &[f64], dists: &[f64]) -> usize {
    let mut best = 0;
    for y in 1..values.len() {
        if values[y] > values[best] || (values[y] == values[best] && dists[y] < dists[best]) {
            best = y;
        }
    }
    best
}

/// A trained classifier: the consistent subset, its Lipschitz constant and
/// a nearest-neighbor index over it.
#[derive(Debug, Clone)]
pub struct LipschitzClassifier<M> {
    index: NnIndex<M>,
    lipschitz: f64,
}

impl<M: Metric> LipschitzClassifier<M> {
    /// Builds the classifier, checking `L d >= 2` on every cross-label pair
    /// of `points`. `k` is the size of the label space, which may exceed the
    /// labels present in `points`.
    pub fn new(
        points: Vec<Point>,
        labels: Vec<usize>,
        k: usize,
        lipschitz: f64,
        metric: M,
        mode: NnMode,
    ) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(invalid("lipschitz", format!("{lipschitz} is not a positive real")));
        }
        let index = NnIndex::build(points, labels, k, metric, mode)?;
        let (pts, ys) = (index.points(), index.labels());
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if ys[i] != ys[j] {
                    let d = index.metric().dist(&pts[i], &pts[j]);
                    if !consistent(lipschitz, d) {
                        return Err(Error::CertificateViolated {
                            i,
                            j,
                            product: lipschitz * d,
                        });
                    }
                }
            }
        }
        Ok(Self { index, lipschitz })
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn eta(&self) -> f64 {
        self.index.mode().eta()
    }

    pub fn mode(&self) -> NnMode {
        self.index.mode()
    }

    pub fn k(&self) -> usize {
        self.index.k()
    }

    pub fn index(&self) -> &NnIndex<M> {
        &self.index
    }

    pub fn points(&self) -> &[Point] {
        self.index.points()
    }

    pub fn labels(&self) -> &[usize] {
        self.index.labels()
    }

    pub fn metric(&self) -> &M {
        self.index.metric()
    }

    pub fn check_query(&self, x: &Point) -> Result<()> {
        self.index.check_query(x)
    }

    /// Distance from `x` to the nearest stored point of each label, as
    /// reported by the index; `+inf` for labels with no stored point.
    pub fn label_distances(&self, x: &Point) -> Vec<f64> {
        self.index
            .query_per_label(x)
            .into_iter()
            .map(|a| a.map_or(f64::INFINITY, |a| a.dist))
            .collect()
    }

    /// `f(x, y) = -d(x, S1^y)`.
    pub fn nn_scores(&self, x: &Point) -> ScoreTable {
        ScoreTable(self.label_distances(x).into_iter().map(|d| -d).collect())
    }

    pub fn evaluate_h(&self, x: &Point, y: usize) -> Result<f64> {
        if y >= self.k() {
            return Err(Error::UnknownLabel(y));
        }
        Ok(h_from_distances(self.lipschitz, &self.label_distances(x), y))
    }

    pub fn evaluate_h_raw(&self, x: &Point, y: usize) -> Result<f64> {
        if y >= self.k() {
            return Err(Error::UnknownLabel(y));
        }
        Ok(h_raw_from_distances(self.lipschitz, &self.label_distances(x), y))
    }

    /// `h(x, y)` for every label.
    pub fn h_values(&self, x: &Point) -> Vec<f64> {
        let dists = self.label_distances(x);
        (0..dists.len())
            .map(|y| h_from_distances(self.lipschitz, &dists, y))
            .collect()
    }

    /// Arg-max of `h(x, .)`.
    ///
    /// Beyond distance `2/L` from every stored point all labels share
    /// `h = 0`; such ties fall back to the nearest-neighbor score, then to the
    /// lowest label id, which keeps exact-mode predictions equal to the
    /// nearest stored label.
    pub fn predict(&self, x: &Point) -> usize {
        self.predict_with_margin(x).0
    }

    /// Prediction together with the margin of `h(x, .)` at the predicted
    /// label.
    pub fn predict_with_margin(&self, x: &Point) -> (usize, Margin) {
        let dists = self.label_distances(x);
        let h: Vec<f64> = (0..dists.len())
            .map(|y| h_from_distances(self.lipschitz, &dists, y))
            .collect();
        let y = argmax_by_value_then_distance(&h, &dists);
        let m = margin(&ScoreTable(h), y).expect("predicted label is in range");
        (y, m)
    }

    /// Prediction from the untruncated extension, same tie rule.
    pub fn predict_raw(&self, x: &Point) -> usize {
        let dists = self.label_distances(x);
        let h: Vec<f64> = (0..dists.len())
            .map(|y| h_raw_from_distances(self.lipschitz, &dists, y))
            .collect();
        argmax_by_value_then_distance(&h, &dists)
    }

    /// Mean loss over `sample`.
    pub fn empirical_loss(&self, sample: &Sample, loss: Loss) -> Result<f64> {
        if sample.k() > self.k() {
            return Err(Error::UnknownLabel(sample.k() - 1));
        }
        let mut total = 0.0;
        for (x, y) in sample.iter() {
            self.check_query(x)?;
            total += match loss {
                Loss::ZeroOne => {
                    if self.predict(x) != y {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => surrogate_loss(loss, self.evaluate_h(x, y)?)?,
            };
        }
        Ok(total / sample.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MetricKind, MetricOracle};
    use alloc::vec;

    fn toy(mode: NnMode) -> LipschitzClassifier<MetricOracle> {
        LipschitzClassifier::new(
            vec![Point::scalar(0.0), Point::scalar(1.0)],
            vec![0, 1],
            2,
            2.0,
            MetricOracle::new(MetricKind::L1),
            mode,
        )
        .unwrap()
    }

    // Evaluates both optima by scanning every stored point.
    fn brute_h(points: &[f64], labels: &[usize], l: f64, x: f64, y: usize) -> f64 {
        let lo = points
            .iter()
            .zip(labels)
            .map(|(&p, &yi)| xi(yi, y) + l * (x - p).abs())
            .fold(f64::INFINITY, f64::min);
        let hi = points
            .iter()
            .zip(labels)
            .map(|(&p, &yi)| xi(yi, y) - l * (x - p).abs())
            .fold(f64::NEG_INFINITY, f64::max);
        0.5 * clip(lo) + 0.5 * clip(hi)
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(truncate(-1.0, 1.0, 0.5).unwrap(), 0.5);
        assert_eq!(truncate(-1.0, 1.0, 3.0).unwrap(), 1.0);
        assert_eq!(truncate(0.0, 1.0, -2.0).unwrap(), 0.0);
        assert!(truncate(1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi(1, 1), 1.0);
        assert_eq!(xi(1, 2), -1.0);
        assert_eq!(xi(7, 7), 1.0);
    }

    #[test]
    fn margin_examples() {
        let t = ScoreTable::new(vec![0.5, 0.1, -0.2]).unwrap();
        approx::assert_relative_eq!(margin(&t, 0).unwrap().raw, 0.2, max_relative = 1e-15);
        let t = ScoreTable::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(margin(&t, 0).unwrap().raw, 0.0);
        let t = ScoreTable::new(vec![0.1, 0.9]).unwrap();
        let m = margin(&t, 0).unwrap();
        approx::assert_relative_eq!(m.raw, -0.4, max_relative = 1e-15);
        assert_eq!(m.value, m.raw);
        assert_eq!(margin(&t, 5).unwrap_err(), Error::UnknownLabel(5));
        let t = ScoreTable::new(vec![-3.0]).unwrap();
        let m = margin(&t, 0).unwrap();
        assert_eq!((m.raw, m.value), (f64::INFINITY, 1.0));
        let t = ScoreTable::new(vec![5.0, -5.0]).unwrap();
        assert_eq!(margin(&t, 0).unwrap().value, 1.0);
    }

    #[test]
    fn score_table_rejects_nan() {
        assert!(ScoreTable::new(vec![]).is_err());
        assert!(ScoreTable::new(vec![f64::NAN]).is_err());
        assert!(ScoreTable::new(vec![0.0, f64::NEG_INFINITY]).is_ok());
    }

    #[test]
    fn nn_scores_examples() {
        let c = toy(NnMode::Exact);
        let s = c.nn_scores(&Point::scalar(0.25));
        assert_eq!(s.scores(), &[-0.25, -0.75]);
        assert_eq!(c.nn_scores(&Point::scalar(1.0)).get(1), Some(-0.0));
    }

    #[test]
    fn h_examples() {
        for mode in [NnMode::Exact, NnMode::Approximate { eta: 0.0 }] {
            let c = toy(mode);
            let x = Point::scalar(0.25);
            assert_eq!(c.evaluate_h(&x, 0).unwrap(), 0.5);
            assert_eq!(c.evaluate_h(&x, 1).unwrap(), -0.5);
            assert_eq!(brute_h(&[0.0, 1.0], &[0, 1], 2.0, 0.25, 0), 0.5);
            assert_eq!(brute_h(&[0.0, 1.0], &[0, 1], 2.0, 0.25, 1), -0.5);
            let x = Point::scalar(0.0);
            assert_eq!(c.evaluate_h(&x, 0).unwrap(), 1.0);
            assert_eq!(c.evaluate_h(&x, 1).unwrap(), -1.0);
            assert!(c.evaluate_h(&x, 2).is_err());
        }
    }

    #[test]
    fn h_matches_brute_force_on_a_line() {
        let pts = [0.0, 0.1, 0.45, 0.5, 0.9, 1.3];
        let labels = [0usize, 0, 1, 2, 1, 0];
        let l = 50.0;
        let c = LipschitzClassifier::new(
            pts.iter().map(|&x| Point::scalar(x)).collect(),
            labels.to_vec(),
            3,
            l,
            MetricOracle::new(MetricKind::L1),
            NnMode::Exact,
        )
        .unwrap();
        for i in 0..=300 {
            let x = -0.5 + i as f64 * 0.01;
            for y in 0..3 {
                let got = c.evaluate_h(&Point::scalar(x), y).unwrap();
                let want = brute_h(&pts, &labels, l, x, y);
                assert!((got - want).abs() <= 1e-15, "x={x} y={y}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn certificate_is_enforced() {
        let err = LipschitzClassifier::new(
            vec![Point::scalar(0.0), Point::scalar(0.5)],
            vec![0, 1],
            2,
            2.0,
            MetricOracle::new(MetricKind::L1),
            NnMode::Exact,
        )
        .unwrap_err();
        assert!(matches!(err, Error::CertificateViolated { i: 0, j: 1, .. }));
        // boundary L d = 2 is allowed
        toy(NnMode::Exact);
    }

    #[test]
    fn predict_examples() {
        let c = toy(NnMode::Exact);
        assert_eq!(c.predict(&Point::scalar(0.25)), 0);
        assert_eq!(c.predict(&Point::scalar(0.5)), 0);
        assert_eq!(c.predict(&Point::scalar(0.75)), 1);
        // far away: every h is 0, the nearest label wins
        assert_eq!(c.predict(&Point::scalar(7.0)), 1);
        assert_eq!(c.predict(&Point::scalar(-7.0)), 0);
        let (y, m) = c.predict_with_margin(&Point::scalar(1.0));
        assert_eq!((y, m.value), (1, 1.0));
    }

    #[test]
    fn tie_rule_prefers_lower_label() {
        let c = LipschitzClassifier::new(
            vec![Point::scalar(1.0), Point::scalar(-1.0)],
            vec![1, 0],
            2,
            1.0,
            MetricOracle::new(MetricKind::L1),
            NnMode::Exact,
        )
        .unwrap();
        assert_eq!(c.predict(&Point::scalar(0.0)), 0);
        assert_eq!(c.predict_raw(&Point::scalar(0.0)), 0);
    }

    #[test]
    fn single_label_classifier() {
        let c = LipschitzClassifier::new(
            vec![Point::scalar(0.0), Point::scalar(0.3)],
            vec![0, 0],
            1,
            3.0,
            MetricOracle::new(MetricKind::L1),
            NnMode::Exact,
        )
        .unwrap();
        let (y, m) = c.predict_with_margin(&Point::scalar(5.0));
        assert_eq!((y, m.value), (0, 1.0));
        assert_eq!(c.evaluate_h(&Point::scalar(0.0), 0).unwrap(), 1.0);
    }

    #[test]
    fn loss_definitions() {
        assert_eq!(surrogate_loss(Loss::Cutoff, 1.0).unwrap(), 0.0);
        assert_eq!(surrogate_loss(Loss::Cutoff, 0.5).unwrap(), 1.0);
        assert_eq!(surrogate_loss(Loss::Margin, 0.5).unwrap(), 0.5);
        let hs = [1.0, 1.0, 0.2, -1.0];
        let cutoff: f64 = hs
            .iter()
            .map(|&u| surrogate_loss(Loss::Cutoff, u).unwrap())
            .sum::<f64>()
            / 4.0;
        let marg: f64 = hs
            .iter()
            .map(|&u| surrogate_loss(Loss::Margin, u).unwrap())
            .sum::<f64>()
            / 4.0;
        assert_eq!(cutoff, 0.5);
        approx::assert_relative_eq!(marg, 0.45, max_relative = 1e-15);
        assert!(surrogate_loss(Loss::ZeroOne, 0.0).is_err());
    }

    #[test]
    fn empirical_loss_examples() {
        let c = toy(NnMode::Exact);
        let s = Sample::new(vec![Point::scalar(0.0), Point::scalar(1.0)], vec![0, 1]).unwrap();
        assert_eq!(c.empirical_loss(&s, Loss::Cutoff).unwrap(), 0.0);
        assert_eq!(c.empirical_loss(&s, Loss::ZeroOne).unwrap(), 0.0);
        // h(0.25, A) = 0.5 and h(0.75, B) = 0.5
        let s = Sample::new(vec![Point::scalar(0.25), Point::scalar(0.75)], vec![0, 1]).unwrap();
        assert_eq!(c.empirical_loss(&s, Loss::Margin).unwrap(), 0.5);
        assert_eq!(c.empirical_loss(&s, Loss::Cutoff).unwrap(), 1.0);
        assert_eq!(c.empirical_loss(&s, Loss::ZeroOne).unwrap(), 0.0);
        let s = Sample::new(vec![Point::scalar(0.0)], vec![2]);
        assert!(s.is_err());
    }
}
