mod common;

use common::{random_labels, random_vectors, rng};
use metric_margin_core::ann::{NnIndex, NnMode};
use metric_margin_core::metric::{Metric, MetricKind, MetricOracle, Point};
use proptest::prelude::*;
use rand::Rng;

fn brute(points: &[Point], labels: &[usize], m: &MetricOracle, x: &Point, y: Option<usize>) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, p) in points.iter().enumerate() {
        if y.is_some_and(|y| labels[i] != y) {
            continue;
        }
        let d = m.dist(x, p);
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, i));
        }
    }
    best
}

const KINDS: [MetricKind; 3] = [MetricKind::L1, MetricKind::L2, MetricKind::LInf];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sandwich_and_per_label(seed in any::<u64>(), n in 1usize..200, dim in 1usize..4, kind in 0usize..3,
                              k in 1usize..5, eta in 0.0..0.5f64) {
        let mut r = rng(seed);
        let pts = random_vectors(&mut r, n, dim);
        let ys = random_labels(&mut r, n, k.min(n));
        let m = MetricOracle::new(KINDS[kind]);
        let idx = NnIndex::build(pts.clone(), ys.clone(), k, m, NnMode::Approximate { eta }).unwrap();
        prop_assert!(idx.check_net_invariants().is_ok());
        for _ in 0..20 {
            let x = Point::Vector((0..dim).map(|_| r.random_range(-0.5..1.5)).collect());
            let (d, _) = brute(&pts, &ys, &m, &x, None).unwrap();
            let a = idx.query(&x);
            prop_assert!(a.dist >= d && a.dist <= (1.0 + eta) * d, "{} vs {}", a.dist, d);
            prop_assert_eq!(m.dist(&x, &pts[a.index]), a.dist);
            prop_assert_eq!(ys[a.index], a.label);
            for (y, got) in idx.query_per_label(&x).into_iter().enumerate() {
                match (brute(&pts, &ys, &m, &x, Some(y)), got) {
                    (None, None) => {}
                    (Some((dy, _)), Some(g)) => {
                        prop_assert_eq!(g.label, y);
                        prop_assert!(g.dist >= dy && g.dist <= (1.0 + eta) * dy);
                    }
                    (b, g) => prop_assert!(false, "label {}: brute {:?} vs index {:?}", y, b, g),
                }
            }
        }
    }

    #[test]
    fn zero_eta_matches_exact(seed in any::<u64>(), n in 1usize..150, dim in 1usize..3, kind in 0usize..3) {
        let mut r = rng(seed);
        // a coarse grid forces distance ties and duplicates
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::Vector((0..dim).map(|_| r.random_range(0..8) as f64 / 4.0).collect()))
            .collect();
        let ys = random_labels(&mut r, n, 3.min(n));
        let m = MetricOracle::new(KINDS[kind]);
        let exact = NnIndex::build(pts.clone(), ys.clone(), 3, m, NnMode::Exact).unwrap();
        let approx = NnIndex::build(pts, ys, 3, m, NnMode::Approximate { eta: 0.0 }).unwrap();
        for _ in 0..20 {
            let x = Point::Vector((0..dim).map(|_| r.random_range(-2..10) as f64 / 4.0).collect());
            prop_assert_eq!(exact.query(&x), approx.query(&x));
            prop_assert_eq!(exact.query_per_label(&x), approx.query_per_label(&x));
        }
    }
}

#[test]
fn line_nets_hold_invariants() {
    let pts: Vec<Point> = (0..1024).map(|i| Point::scalar(i as f64 / 1023.0)).collect();
    let ys = vec![0; 1024];
    let idx = NnIndex::build(
        pts,
        ys,
        1,
        MetricOracle::new(MetricKind::L1),
        NnMode::Approximate { eta: 0.1 },
    )
    .unwrap();
    idx.check_net_invariants().unwrap();
    // nets are nested and grow to the whole set
    let mut prev = 0;
    for m in 0..idx.levels() {
        let net = idx.net(m);
        assert!(net.len() >= prev);
        prev = net.len();
    }
    assert_eq!(prev, 1024);
}

#[test]
fn levenshtein_sandwich() {
    let mut r = rng(17);
    let word = |r: &mut rand_chacha::ChaCha8Rng| -> String {
        let len = r.random_range(0..10);
        (0..len).map(|_| b"acgt"[r.random_range(0..4)] as char).collect()
    };
    let words: Vec<String> = (0..300).map(|_| word(&mut r)).collect();
    let pts: Vec<Point> = words.iter().map(|w| Point::text(w)).collect();
    let ys = random_labels(&mut r, 300, 4);
    let m = MetricOracle::new(MetricKind::Levenshtein);
    for eta in [0.0, 0.1, 0.5] {
        let idx = NnIndex::build(pts.clone(), ys.clone(), 4, m, NnMode::Approximate { eta }).unwrap();
        idx.check_net_invariants().unwrap();
        for _ in 0..100 {
            let x = Point::text(&word(&mut r));
            let (d, _) = brute(&pts, &ys, &m, &x, None).unwrap();
            let a = idx.query(&x);
            assert!(a.dist >= d && a.dist <= (1.0 + eta) * d);
        }
    }
}
