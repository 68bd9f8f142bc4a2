//! Synthetic distributions with Lipschitz class posteriors, their Bayes
//! risk, and a Monte-Carlo harness for the 1-NN risk.
//!
//! Marginals are uniform on `[0, 1]` or `[0, 1]^2`, so the domain has unit
//! diameter under the L-infinity norm. Posteriors are Lipschitz with respect
//! to the sup-norm on the probability vector.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ann::{NnIndex, NnMode};
use crate::error::{invalid, Result};
use crate::math::{ln, pow, sqrt};
use crate::metric::{MetricKind, MetricOracle, Point};

/// Number of linear pieces in a generated one-dimensional posterior.
pub const DEFAULT_SEGMENTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    UnitInterval,
    /// `[0,1]^2` under the L-infinity norm.
    UnitSquareLInf,
    /// `[0,1]^2` under the Euclidean norm.
    UnitSquareL2,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::UnitInterval => 1,
            Domain::UnitSquareLInf | Domain::UnitSquareL2 => 2,
        }
    }

    pub fn metric(self) -> MetricOracle {
        match self {
            Domain::UnitInterval | Domain::UnitSquareLInf => MetricOracle::new(MetricKind::LInf),
            Domain::UnitSquareL2 => MetricOracle::new(MetricKind::L2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::UnitInterval => "interval",
            Domain::UnitSquareLInf => "square-linf",
            Domain::UnitSquareL2 => "square-l2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "interval" => Some(Domain::UnitInterval),
            "square-linf" | "square" => Some(Domain::UnitSquareLInf),
            "square-l2" => Some(Domain::UnitSquareL2),
            _ => None,
        }
    }

    /// Distance between two coordinate slices.
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Domain::UnitInterval => (a[0] - b[0]).abs(),
            Domain::UnitSquareLInf => (a[0] - b[0]).abs().max((a[1] - b[1]).abs()),
            Domain::UnitSquareL2 => {
                let dx = a[0] - b[0];
                let dy = a[1] - b[1];
                sqrt(dx * dx + dy * dy)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub domain: Domain,
    pub k: usize,
    pub l_post: f64,
    pub seed: u64,
}

/// A vector-valued piecewise-linear function on `[0, 1]` with equally
/// spaced knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    anchors: Vec<Vec<f64>>,
}

impl PiecewiseLinear {
    /// At least two anchors, each a probability vector of the same length.
    pub fn new(anchors: Vec<Vec<f64>>) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(invalid("anchors", "need at least two knots"));
        }
        let k = anchors[0].len();
        for (i, a) in anchors.iter().enumerate() {
            if a.len() != k {
                return Err(invalid(
                    "anchors",
                    format!("knot {i} has {} entries, expected {k}", a.len()),
                ));
            }
            check_simplex(a).map_err(|r| invalid("anchors", format!("knot {i}: {r}")))?;
        }
        Ok(Self { anchors })
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn segments(&self) -> usize {
        self.anchors.len() - 1
    }

    /// Knot positions `i / segments`.
    pub fn knot(&self, i: usize) -> f64 {
        i as f64 / self.segments() as f64
    }

    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        let m = self.segments();
        let x = x.clamp(0.0, 1.0);
        let s = ((x * m as f64) as usize).min(m - 1);
        let t = x * m as f64 - s as f64;
        let (a, b) = (&self.anchors[s], &self.anchors[s + 1]);
        for y in 0..out.len() {
            out[y] = a[y] + t * (b[y] - a[y]);
        }
    }

    /// Exact Lipschitz constant in the sup-norm.
    pub fn lipschitz(&self) -> f64 {
        let m = self.segments() as f64;
        self.anchors
            .windows(2)
            .map(|w| sup_diff(&w[0], &w[1]) * m)
            .fold(0.0, f64::max)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_simplex(p: &[f64]) -> core::result::Result<(), String> {
    if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(String::from("entries must be finite and nonnegative"));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(format!("entries sum to {s}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Posterior {
    Constant(Vec<f64>),
    /// Interval only.
    Linear(PiecewiseLinear),
    /// Square only: `eta(x) = (a(x1) + b(x2)) / 2`.
    Separable(PiecewiseLinear, PiecewiseLinear),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDistribution {
    domain: Domain,
    k: usize,
    posterior: Posterior,
    l_post: f64,
    warning: Option<String>,
}

impl SyntheticDistribution {
    /// The same class probabilities everywhere.
    pub fn constant(domain: Domain, probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(invalid("k", "at least two classes required"));
        }
        check_simplex(&probs).map_err(|r| invalid("posterior", r))?;
        Ok(Self {
            domain,
            k: probs.len(),
            posterior: Posterior::Constant(probs),
            l_post: 0.0,
            warning: None,
        })
    }

    /// Deterministic labels: class `label` with probability one everywhere.
    pub fn one_hot(domain: Domain, k: usize, label: usize) -> Result<Self> {
        if label >= k {
            return Err(invalid("label", format!("{label} is not below k = {k}")));
        }
        let mut p = vec![0.0; k];
        p[label] = 1.0;
        Self::constant(domain, p)
    }

    /// A one-dimensional piecewise-linear posterior.
    pub fn interval(posterior: PiecewiseLinear) -> Result<Self> {
        let k = posterior.anchors[0].len();
        if k < 2 {
            return Err(invalid("k", "at least two classes required"));
        }
        let l_post = posterior.lipschitz();
        Ok(Self {
            domain: Domain::UnitInterval,
            k,
            posterior: Posterior::Linear(posterior),
            l_post,
            warning: None,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn posterior(&self) -> &Posterior {
        &self.posterior
    }

    /// Certified Lipschitz constant of the posterior.
    pub fn l_post(&self) -> f64 {
        self.l_post
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn eta_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.posterior {
            Posterior::Constant(p) => out.copy_from_slice(p),
            Posterior::Linear(f) => f.eval_into(x[0], out),
            Posterior::Separable(a, b) => {
                let mut tmp = vec![0.0; self.k];
                a.eval_into(x[0], out);
                b.eval_into(x[1], &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o = 0.5 * (*o + t);
                }
            }
        }
    }

    pub fn eta(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        self.eta_into(x, &mut out);
        out
    }

    /// Bayes classifier `argmax_y eta_y(x)`, lowest label on ties.
    pub fn bayes_label(&self, x: &[f64]) -> usize {
        argmax(&self.eta(x))
    }

    /// Draws `x` uniformly from the domain.
    pub fn sample_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.domain.dim()).map(|_| rng.random::<f64>()).collect()
    }

    /// Draws `y ~ eta(x)`.
    pub fn sample_y<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> usize {
        let eta = self.eta(x);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (y, p) in eta.iter().enumerate() {
            acc += p;
            if u < acc {
                return y;
            }
        }
        // rounding left u above the running sum: take the last class with mass
        eta.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Uniform draw from the probability simplex.
fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| -ln(1.0 - rng.random::<f64>())).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Walks from a random start towards randomly chosen vertices, taking
/// steps of sup-norm at most `l / segments`.
fn random_walk<R: Rng + ?Sized>(k: usize, l: f64, segments: usize, rng: &mut R) -> PiecewiseLinear {
    let step = l / segments as f64;
    let mut anchors = Vec::with_capacity(segments + 1);
    let mut cur = random_simplex(k, rng);
    anchors.push(cur.clone());
    for _ in 0..segments {
        let target = rng.random_range(0..k);
        let mut goal = vec![0.0; k];
        goal[target] = 1.0;
        let gap = sup_diff(&cur, &goal);
        let lambda = if gap > 0.0 { (step / gap).min(1.0) } else { 0.0 };
        let mut next: Vec<f64> = cur.iter().zip(&goal).map(|(c, g)| c + lambda * (g - c)).collect();
        // renormalize away rounding drift
        let s: f64 = next.iter().sum();
        for v in &mut next {
            *v /= s;
        }
        anchors.push(next.clone());
        cur = next;
    }
    PiecewiseLinear { anchors }
}

/// Builds a seeded random distribution whose posterior has Lipschitz
/// constant at most `l_post`.
///
/// When the walk never changes the Bayes label the distribution is still
/// returned, with a warning attached.
pub fn make_distribution(spec: &DistributionSpec) -> Result<SyntheticDistribution> {
    make_distribution_with(spec, DEFAULT_SEGMENTS)
}

pub fn make_distribution_with(spec: &DistributionSpec, segments: usize) -> Result<SyntheticDistribution> {
    if spec.k < 2 {
        return Err(invalid("k", format!("{} classes; at least 2 required", spec.k)));
    }
    if !(spec.l_post > 0.0 && spec.l_post.is_finite()) {
        return Err(invalid("l_post", format!("{} is not a positive real", spec.l_post)));
    }
    if segments == 0 {
        return Err(invalid("segments", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (posterior, l_post) = match spec.domain {
        Domain::UnitInterval => {
            let f = random_walk(spec.k, spec.l_post, segments, &mut rng);
            let l = f.lipschitz();
            (Posterior::Linear(f), l)
        }
        Domain::UnitSquareLInf | Domain::UnitSquareL2 => {
            let a = random_walk(spec.k, spec.l_post, segments, &mut rng);
            let b = random_walk(spec.k, spec.l_post, segments, &mut rng);
            // |a(x1)-a(y1)|/2 + |b(x2)-b(y2)|/2 <= max(La, Lb) * max(|dx1|, |dx2|),
            // and the max-norm is dominated by the Euclidean norm
            let l = a.lipschitz().max(b.lipschitz());
            (Posterior::Separable(a, b), l)
        }
    };
    let mut dist = SyntheticDistribution {
        domain: spec.domain,
        k: spec.k,
        posterior,
        l_post,
        warning: None,
    };
    let probes = 257;
    let first = dist.bayes_label(&probe(spec.domain, 0, probes));
    let total = if spec.domain.dim() == 1 {
        probes
    } else {
        probes * probes
    };
    let varies = (1..total).any(|i| dist.bayes_label(&probe(spec.domain, i, probes)) != first);
    if !varies {
        dist.warning = Some(format!(
            "L_post = {} is too small for the Bayes label to change over the domain",
            spec.l_post
        ));
    }
    Ok(dist)
}

fn probe(domain: Domain, i: usize, m: usize) -> Vec<f64> {
    let at = |j: usize| j as f64 / (m - 1) as f64;
    match domain.dim() {
        1 => vec![at(i)],
        _ => vec![at(i % m), at(i / m)],
    }
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Absolute tolerance of [`bayes_risk`].
pub const QUADRATURE_TOL: f64 = 1e-6;

/// `E[1 - max_y eta_y(X)]` under the uniform marginal.
pub fn bayes_risk(dist: &SyntheticDistribution) -> f64 {
    let k = dist.k;
    match &dist.posterior {
        Posterior::Constant(p) => 1.0 - p.iter().cloned().fold(0.0, f64::max),
        Posterior::Linear(f) => {
            let m = f.segments();
            let tol = QUADRATURE_TOL / m as f64;
            let mut buf = vec![0.0; k];
            let mut total = 0.0;
            for s in 0..m {
                total += adaptive_simpson(
                    |x| {
                        f.eval_into(x, &mut buf);
                        1.0 - buf.iter().cloned().fold(0.0, f64::max)
                    },
                    f.knot(s),
                    f.knot(s + 1),
                    tol,
                );
            }
            total
        }
        Posterior::Separable(a, b) => {
            let ma = a.segments();
            let mb = b.segments();
            let outer_tol = 0.5 * QUADRATURE_TOL / ma as f64;
            let inner_tol = 0.5 * QUADRATURE_TOL / mb as f64;
            let mut ea = vec![0.0; k];
            let mut eb = vec![0.0; k];
            let mut total = 0.0;
            for s in 0..ma {
                total += adaptive_simpson(
                    |x1| {
                        a.eval_into(x1, &mut ea);
                        let mut inner = 0.0;
                        for t in 0..mb {
                            inner += adaptive_simpson(
                                |x2| {
                                    b.eval_into(x2, &mut eb);
                                    let top = ea.iter().zip(&eb).map(|(u, v)| 0.5 * (u + v)).fold(0.0, f64::max);
                                    1.0 - top
                                },
                                b.knot(t),
                                b.knot(t + 1),
                                inner_tol,
                            );
                        }
                        inner
                    },
                    a.knot(s),
                    a.knot(s + 1),
                    outer_tol,
                );
            }
            total
        }
    }
}

/// Outcome of a Monte-Carlo comparison between 1-NN risk and the
/// near-optimality bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub bayes_risk: f64,
    pub mean_nn_risk: f64,
    pub trials: usize,
    pub n: usize,
    /// `2 * bayes_risk + 4 * L_post * n^(-1/(D+1))` with `D` the domain dimension.
    pub bound_rhs: f64,
    /// Standard error of the trial mean; 0 for a single trial.
    pub mc_stderr: f64,
    pub seed: u64,
}

impl RiskReport {
    /// Whether the mean risk is within three standard errors of the bound.
    pub fn pass(&self) -> bool {
        self.mean_nn_risk <= self.bound_rhs + 3.0 * self.mc_stderr
    }
}

pub fn bound_rhs(bayes: f64, l_post: f64, n: usize, dim: usize) -> f64 {
    2.0 * bayes + 4.0 * l_post * pow(n as f64, -1.0 / (dim as f64 + 1.0))
}

/// Generator for one trial: stream `trial` of the ChaCha8 generator seeded
/// with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Risk of a 1-NN classifier trained on `n` fresh draws, estimated on
/// `test_points` fresh marginal draws as the mean of `1 - eta_{g(x)}(x)`.
pub fn run_trial(dist: &SyntheticDistribution, n: usize, test_points: usize, seed: u64, trial: u64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    if test_points == 0 {
        return Err(invalid("test_points", "must be positive"));
    }
    let mut rng = trial_rng(seed, trial);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x = dist.sample_x(&mut rng);
        labels.push(dist.sample_y(&x, &mut rng));
        points.push(Point::Vector(x));
    }
    let index = NnIndex::build(points, labels, dist.k, dist.domain.metric(), NnMode::Exact)?;
    let mut eta = vec![0.0; dist.k];
    let mut total = 0.0;
    for _ in 0..test_points {
        let x = dist.sample_x(&mut rng);
        dist.eta_into(&x, &mut eta);
        let g = index.query(&Point::Vector(x)).label;
        total += 1.0 - eta[g];
    }
    Ok(total / test_points as f64)
}

/// Summarizes per-trial risks into a report.
pub fn summarize(dist: &SyntheticDistribution, n: usize, seed: u64, risks: &[f64]) -> RiskReport {
    let t = risks.len();
    let mean = risks.iter().sum::<f64>() / t as f64;
    let stderr = if t > 1 {
        let var = risks.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (t - 1) as f64;
        sqrt(var / t as f64)
    } else {
        0.0
    };
    let bayes = bayes_risk(dist);
    RiskReport {
        bayes_risk: bayes,
        mean_nn_risk: mean,
        trials: t,
        n,
        bound_rhs: bound_rhs(bayes, dist.l_post, n, dist.domain.dim()),
        mc_stderr: stderr,
        seed,
    }
}

/// Runs `trials` independent trials sequentially.
pub fn nn_risk_trials(
    dist: &SyntheticDistribution,
    n: usize,
    trials: usize,
    test_points: usize,
    seed: u64,
) -> Result<RiskReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let risks = (0..trials)
        .map(|t| run_trial(dist, n, test_points, seed, t as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(dist, n, seed, &risks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> SyntheticDistribution {
        SyntheticDistribution::interval(PiecewiseLinear::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn constant_posterior_risk() {
        let d = SyntheticDistribution::constant(Domain::UnitInterval, vec![0.8, 0.2]).unwrap();
        assert!((bayes_risk(&d) - 0.2).abs() < 1e-15);
        assert_eq!(d.bayes_label(&[0.3]), 0);
    }

    #[test]
    fn one_hot_has_zero_risk() {
        let d = SyntheticDistribution::one_hot(Domain::UnitSquareLInf, 3, 1).unwrap();
        assert_eq!(bayes_risk(&d), 0.0);
        let r = nn_risk_trials(&d, 20, 3, 50, 7).unwrap();
        assert_eq!(r.mean_nn_risk, 0.0);
    }

    #[test]
    fn ramp_risk_is_quarter() {
        let d = ramp();
        assert_eq!(d.l_post(), 1.0);
        assert!((bayes_risk(&d) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn generated_posteriors_are_valid() {
        for (domain, k) in [
            (Domain::UnitInterval, 5),
            (Domain::UnitSquareL2, 3),
            (Domain::UnitSquareLInf, 4),
        ] {
            let d = make_distribution(&DistributionSpec {
                domain,
                k,
                l_post: 2.0,
                seed: 11,
            })
            .unwrap();
            assert!(d.l_post() <= 2.0 * (1.0 + 1e-12));
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..2000 {
                let x = d.sample_x(&mut rng);
                let y = d.sample_x(&mut rng);
                let (ex, ey) = (d.eta(&x), d.eta(&y));
                assert!((ex.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(sup_diff(&ex, &ey) <= d.l_post() * domain.dist(&x, &y) * (1.0 + 1e-9) + 1e-15);
            }
        }
    }

    #[test]
    fn tiny_lipschitz_warns() {
        let d = make_distribution(&DistributionSpec {
            domain: Domain::UnitInterval,
            k: 2,
            l_post: 1e-6,
            seed: 1,
        })
        .unwrap();
        assert!(d.warning().is_some());
    }

    #[test]
    fn trials_are_reproducible() {
        let d = ramp();
        let a = nn_risk_trials(&d, 30, 4, 40, 99).unwrap();
        let b = nn_risk_trials(&d, 30, 4, 40, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_nn_risk >= 0.0 && a.mean_nn_risk <= 1.0);
    }

    #[test]
    fn rejects_bad_specs() {
        let spec = DistributionSpec {
            domain: Domain::UnitInterval,
            k: 1,
            l_post: 1.0,
            seed: 0,
        };
        assert!(make_distribution(&spec).is_err());
        let spec = DistributionSpec {
            k: 2,
            l_post: 0.0,
            ..spec
        };
        assert!(make_distribution(&spec).is_err());
        assert!(SyntheticDistribution::constant(Domain::UnitInterval, vec![0.5, 0.6]).is_err());
    }
}
