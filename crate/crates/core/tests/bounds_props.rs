// Reference values keep all the digits the 50-digit oracle printed.
#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use metric_margin_core::bounds::{
    delta_combined, delta_combined_with, delta_fat, delta_fat_with, delta_rad, dimred_bound, entropy_bound,
    rademacher_bound, BoundParams, FatConstant, Winner,
};

fn p(n: u64, l: f64, d: f64, k: u64, delta: f64) -> BoundParams {
    BoundParams::new(n, l, d, k, delta).unwrap()
}

const NS: [u64; 5] = [1, 10, 1000, 100_000, 10_000_000];
const LS: [f64; 5] = [0.01, 0.3, 1.0, 2.5, 40.0];
const DS: [f64; 4] = [0.0, 1.0, 2.0, 5.5];
const KS: [u64; 4] = [2, 3, 10, 100];
const DELTAS: [f64; 3] = [0.001, 0.05, 0.5];

fn grid() -> impl Iterator<Item = (usize, usize, usize, usize, usize)> {
    (0..NS.len()).flat_map(|a| {
        (0..LS.len()).flat_map(move |b| {
            (0..DS.len())
                .flat_map(move |c| (0..KS.len()).flat_map(move |d| (0..DELTAS.len()).map(move |e| (a, b, c, d, e))))
        })
    })
}

#[test]
fn monotone_in_l_k_and_n() {
    let mut tuples = 0;
    for (a, b, c, d, e) in grid() {
        tuples += 1;
        let base = p(NS[a], LS[b], DS[c], KS[d], DELTAS[e]);
        let eval = |q: &BoundParams| {
            let v = delta_combined(q);
            let v64 = delta_combined_with(q, FatConstant::EntropyConsistent);
            let n = q.n as f64;
            [
                v.delta_rad,
                v.delta_fat,
                v.combined,
                v64.delta_fat,
                v64.combined,
                rademacher_bound(n, q.lipschitz, q.ddim, q.k),
                dimred_bound(q.lipschitz, 0.2, q.ddim, q.k, n, 1.0).asymptotic,
                dimred_bound(q.lipschitz, 0.2, q.ddim, q.k, n, 1.0).chain,
            ]
        };
        let here = eval(&base);
        let check = |other: &BoundParams, up: bool, what: &str| {
            for (i, (x, y)) in here.iter().zip(eval(other)).enumerate() {
                let ok = if up { y >= *x } else { y <= *x };
                assert!(ok, "{what} column {i}: {x} -> {y} at {base:?}");
            }
        };
        if b + 1 < LS.len() {
            check(&p(NS[a], LS[b + 1], DS[c], KS[d], DELTAS[e]), true, "L");
        }
        if d + 1 < KS.len() {
            check(&p(NS[a], LS[b], DS[c], KS[d + 1], DELTAS[e]), true, "k");
        }
        if a + 1 < NS.len() {
            check(&p(NS[a + 1], LS[b], DS[c], KS[d], DELTAS[e]), false, "n");
        }
        let v = delta_combined(&base);
        assert!(v.combined <= v.delta_rad && v.combined <= v.delta_fat);
        assert_eq!(v.combined, v.delta_rad.min(v.delta_fat));
        assert_eq!(v.winner == Winner::Fat, v.delta_fat < v.delta_rad);
    }
    assert!(tuples >= 1000);
}

#[test]
fn entropy_halving_eps() {
    for &l in &LS {
        for &d in &DS {
            for &k in &KS {
                for eps in [0.001, 0.01, 0.1, 0.5, 1.0] {
                    let (a, b) = (entropy_bound(eps, l, d, k), entropy_bound(eps / 2.0, l, d, k));
                    assert!(b >= 2f64.powf(d) * a * (1.0 - 1e-14), "{b} vs {a}");
                    assert!(entropy_bound(eps, l * 1.5, d, k) >= a);
                    assert!(entropy_bound(eps, l, d, k + 1) >= a);
                }
            }
        }
    }
}

// Values below were produced by `tests/data/gen_bound_reference.py` at 50 digits.
#[test]
fn reference_spot_values() {
    assert_relative_eq!(
        rademacher_bound(1e4, 0.5, 2.0, 10),
        0.07313643718614249968559408,
        max_relative = 1e-13
    );
    let q = p(4096, 1.0, 1.0, 10, 0.01);
    assert_relative_eq!(delta_rad(&q).total, 0.2726670524911022894143216, max_relative = 1e-13);
    assert_relative_eq!(delta_fat(&q).total, 0.292431200364044324106716, max_relative = 1e-13);
    let dr = dimred_bound(1.0, 0.1, 1.0, 10, 1e4, 1.0);
    assert_relative_eq!(dr.asymptotic, 0.1197788346608897771394349, max_relative = 1e-13);
    assert_relative_eq!(dr.chain, 0.03956766932177954317719459, max_relative = 1e-13);
    assert_relative_eq!(
        entropy_bound(0.25, 1.0, 2.0, 10),
        21701.90793338075823084837,
        max_relative = 1e-13
    );
}

#[test]
fn clamps_and_limits() {
    let half = delta_rad(&p(1000, 0.5, 1.0, 10, 0.01));
    assert_eq!(half.stratification, 0.0);
    assert!(half.stratification_clamped);
    assert!(delta_rad(&p(1_000_000_000_000, 1.0, 1.0, 10, 0.01)).total < 1e-3);
    let tiny = delta_fat(&p(100, 0.001, 1.0, 10, 0.01));
    assert!(tiny.confidence_clamped);
    for &l in &[1.0 / 16.0, 1.0, 3.0] {
        for &d in &DS {
            for &k in &KS {
                assert!(delta_fat(&p(1, l, d, k, 0.01)).total >= 1.0);
            }
        }
    }
    // dominant term once (16L)^D is large
    let q = p(10_000, 50.0, 3.0, 10, 0.01);
    let approx = (4.0 * 800f64.powi(3) * 200f64.ln() / 10_000.0).sqrt();
    assert_relative_eq!(delta_fat(&q).total, approx, max_relative = 1e-4);
    // zero perturbation reduces to the Rademacher rate
    assert_relative_eq!(
        dimred_bound(2.0, 0.0, 1.5, 10, 500.0, 1.0).chain,
        rademacher_bound(500.0, 2.0, 1.5, 10),
        max_relative = 1e-15
    );
    let e = delta_fat_with(&q, FatConstant::EntropyConsistent).total;
    assert!(e > delta_fat(&q).total);
}
