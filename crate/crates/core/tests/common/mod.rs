#![allow(dead_code)]

use metric_margin_core::metric::{Point, Sample};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spacing of floats at `x`.
pub fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        f64::from_bits(1)
    } else {
        a.next_up() - a
    }
}

pub fn within_ulps(got: f64, want: f64, n: f64) -> bool {
    (got - want).abs() <= n * ulp(got.abs().max(want.abs()))
}

pub fn random_vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Point> {
    (0..n)
        .map(|_| Point::Vector((0..dim).map(|_| rng.random::<f64>()).collect()))
        .collect()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    // every label appears so the ids stay dense
    let mut ys: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        ys.swap(i, rng.random_range(0..=i));
    }
    ys
}

pub fn random_sample(rng: &mut ChaCha8Rng, n: usize, dim: usize, k: usize) -> Sample {
    let pts = random_vectors(rng, n, dim);
    let ys = random_labels(rng, n, k);
    Sample::new(pts, ys).unwrap()
}

pub fn coords(p: &Point) -> &[f64] {
    match p {
        Point::Vector(v) => v,
        Point::Text(_) => panic!("vector expected"),
    }
}

/// Smallest Lipschitz constant under which every cross-label pair of the
/// sample is consistent, or `None` when two differently labeled points
/// coincide.
pub fn certified_lipschitz<M: metric_margin_core::metric::Metric>(pts: &[Point], ys: &[usize], m: &M) -> Option<f64> {
    let mut l: f64 = 1e-3;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if ys[i] != ys[j] {
                let d = m.dist(&pts[i], &pts[j]);
                if d == 0.0 {
                    return None;
                }
                l = l.max(metric_margin_core::srm::breakpoint(d));
            }
        }
    }
    Some(l)
}
