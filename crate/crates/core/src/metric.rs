//! Points, metric oracles, sample normalization and doubling-dimension
//! bookkeeping.

use alloc::vec::Vec;
use alloc::{format, string::String};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::math;

/// An element of the instance space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    /// Dense real vector.
    Vector(Vec<f64>),
    /// Finite string over the byte alphabet.
    Text(Vec<u8>),
}

impl Point {
    pub fn scalar(x: f64) -> Self {
        Point::Vector(alloc::vec![x])
    }

    pub fn text(s: &str) -> Self {
        Point::Text(s.as_bytes().to_vec())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Vector(_) => "vector",
            Point::Text(_) => "string",
        }
    }

    /// Checks that two points can live in the same sample: same payload
    /// kind, and same length for vectors.
    pub fn compatible_with(&self, other: &Point) -> Result<()> {
        match (self, other) {
            (Point::Vector(a), Point::Vector(b)) if a.len() != b.len() => Err(Error::InvalidSample(format!(
                "vector of length {} against vector of length {}",
                a.len(),
                b.len()
            ))),
            (Point::Vector(_), Point::Vector(_)) | (Point::Text(_), Point::Text(_)) => Ok(()),
            _ => Err(Error::PayloadMismatch {
                left: self.kind_name(),
                right: other.kind_name(),
            }),
        }
    }
}

/// A distance function on [`Point`]s.
///
/// `dist` may assume both arguments passed [`Metric::validate`] and are
/// mutually compatible; callers in this crate check that at the boundary.
pub trait Metric {
    fn dist(&self, a: &Point, b: &Point) -> f64;

    fn validate(&self, _p: &Point) -> Result<()> {
        Ok(())
    }
}

impl<M: Metric + ?Sized> Metric for &M {
    fn dist(&self, a: &Point, b: &Point) -> f64 {
        (**self).dist(a, b)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        (**self).validate(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    L1,
    L2,
    #[serde(rename = "linf")]
    LInf,
    Levenshtein,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::L1 => "l1",
            MetricKind::L2 => "l2",
            MetricKind::LInf => "linf",
            MetricKind::Levenshtein => "levenshtein",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "l1" => Some(MetricKind::L1),
            "l2" => Some(MetricKind::L2),
            "linf" => Some(MetricKind::LInf),
            "levenshtein" => Some(MetricKind::Levenshtein),
            _ => None,
        }
    }

    fn payload(self) -> &'static str {
        match self {
            MetricKind::Levenshtein => "string",
            _ => "vector",
        }
    }
}

/// One of the built-in metrics, multiplied by a positive scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricOracle {
    pub kind: MetricKind,
    pub scale: f64,
}

impl MetricOracle {
    pub fn new(kind: MetricKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn with_scale(kind: MetricKind, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", format!("{scale} is not a positive finite real")));
        }
        Ok(Self { kind, scale })
    }

    /// Checked distance: the payload kinds must match the oracle.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.validate(a)?;
        self.validate(b)?;
        a.compatible_with(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance before scaling.
    pub fn raw(&self, a: &Point, b: &Point) -> f64 {
        match (self.kind, a, b) {
            (MetricKind::L1, Point::Vector(a), Point::Vector(b)) => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            (MetricKind::L2, Point::Vector(a), Point::Vector(b)) => {
                math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            }
            (MetricKind::LInf, Point::Vector(a), Point::Vector(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            (MetricKind::Levenshtein, Point::Text(a), Point::Text(b)) => levenshtein(a, b) as f64,
            _ => f64::NAN,
        }
    }
}

impl Metric for MetricOracle {
    #[inline]
    fn dist(&self, a: &Point, b: &Point) -> f64 {
        self.scale * self.raw(a, b)
    }

    fn validate(&self, p: &Point) -> Result<()> {
        if p.kind_name() == self.kind.payload() {
            Ok(())
        } else {
            Err(Error::UnsupportedPayload {
                metric: self.kind.name(),
                payload: p.kind_name(),
            })
        }
    }
}

/// Edit distance with unit insert, delete and substitute costs.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// A labeled training set. Labels are dense ids `0..k`; every id occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    points: Vec<Point>,
    labels: Vec<usize>,
    k: usize,
}

impl Sample {
    /// Validates homogeneity of payloads and density of labels.
    pub fn new(points: Vec<Point>, labels: Vec<usize>) -> Result<Self> {
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
        for p in &points[1..] {
            points[0].compatible_with(p)?;
        }
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = alloc::vec![false; k];
        for &y in &labels {
            seen[y] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidSample(format!("label id {missing} never occurs")));
        }
        Ok(Self { points, labels, k })
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

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, usize)> {
        self.points.iter().zip(self.labels.iter().copied())
    }

    pub fn into_parts(self) -> (Vec<Point>, Vec<usize>) {
        (self.points, self.labels)
    }

    pub fn validate_with<M: Metric>(&self, metric: &M) -> Result<()> {
        self.points.iter().try_for_each(|p| metric.validate(p))
    }
}

/// Largest pairwise distance.
pub fn diameter<M: Metric>(points: &[Point], metric: &M) -> f64 {
    let mut diam = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diam = diam.max(metric.dist(a, b));
        }
    }
    diam
}

/// Rescales `oracle` so that the sample has diameter 1.
pub fn normalize_sample(sample: &Sample, oracle: &MetricOracle) -> Result<MetricOracle> {
    sample.validate_with(oracle)?;
    if sample.len() < 2 {
        return Err(Error::DegenerateDiameter);
    }
    let raw = diameter(sample.points(), &MetricOracle::new(oracle.kind));
    if !(raw > 0.0) {
        return Err(Error::DegenerateDiameter);
    }
    MetricOracle::with_scale(oracle.kind, 1.0 / raw)
}

/// Upper bound `(2 diam / eps)^ddim` on the `eps`-covering number of a
/// space with the given diameter and doubling dimension. Values below 1
/// are returned as-is.
pub fn covering_bound(epsilon: f64, diam: f64, ddim: f64) -> f64 {
    math::pow(2.0 * diam / epsilon, ddim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DdimMethod {
    UserSupplied,
    NetCounting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingEstimate {
    pub ddim: f64,
    pub method: DdimMethod,
    pub scales_examined: Vec<f64>,
    pub net_sizes: Vec<usize>,
}

impl DoublingEstimate {
    pub fn user_supplied(ddim: f64) -> Result<Self> {
        if !(ddim >= 0.0 && ddim.is_finite()) {
            return Err(invalid("ddim", format!("{ddim} is not a nonnegative real")));
        }
        Ok(Self {
            ddim,
            method: DdimMethod::UserSupplied,
            scales_examined: Vec::new(),
            net_sizes: Vec::new(),
        })
    }

    pub fn is_estimate(&self) -> bool {
        self.method == DdimMethod::NetCounting
    }

    pub fn describe(&self) -> String {
        match self.method {
            DdimMethod::UserSupplied => format!("{} (user-supplied)", self.ddim),
            DdimMethod::NetCounting => format!("{} (net-counting estimate)", self.ddim),
        }
    }
}

/// Greedy `r`-net in stored order: a point becomes a center when it is
/// farther than `r` from every center chosen so far.
pub fn greedy_net<M: Metric>(points: &[Point], metric: &M, r: f64) -> Vec<usize> {
    let mut centers: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if centers.iter().all(|&c| metric.dist(&points[c], p) > r) {
            centers.push(i);
        }
    }
    centers
}

/// Net-counting doubling-dimension estimate.
///
/// Greedy nets are built at radii `diam / 2^j` for `j = 0..=floor(log2 n)`;
/// the estimate is the largest `log2(N(r/2) / N(r))` between consecutive
/// radii. The `j = 0` net always has one center.
pub fn estimate_ddim<M: Metric>(sample: &Sample, metric: &M) -> Result<DoublingEstimate> {
    sample.validate_with(metric)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::DegenerateDiameter);
    }
    let diam = diameter(sample.points(), metric);
    if !(diam > 0.0) {
        return Err(Error::DegenerateDiameter);
    }
    let levels = usize::BITS - 1 - n.leading_zeros();
    let mut scales = Vec::with_capacity(levels as usize + 1);
    let mut sizes = Vec::with_capacity(levels as usize + 1);
    let mut r = diam;
    for _ in 0..=levels {
        scales.push(r);
        sizes.push(greedy_net(sample.points(), metric, r).len());
        r *= 0.5;
    }
    let ddim = sizes
        .windows(2)
        .map(|w| math::log2(w[1] as f64 / w[0] as f64))
        .fold(0.0, f64::max);
    Ok(DoublingEstimate {
        ddim,
        method: DdimMethod::NetCounting,
        scales_examined: scales,
        net_sizes: sizes,
    })
}
