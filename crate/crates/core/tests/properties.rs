//! Randomized cross-module properties on seeded lattice instances.

mod common;

use common::{wide_grid, Gen};
use riskorder::expectile::higher_order_gamma_points;
use riskorder::oracle::{dense_dominance_sweep, grid_min_higher_order};
use riskorder::{
    avar, higher_order_expectile, higher_order_risk, spectral_order, verify_dominance, DiscreteDistribution,
    ExpectileParams, KusuokaMixture, NormSpec, Outcome,
};

fn risk(n: &NormSpec, beta: f64, d: &DiscreteDistribution) -> f64 {
    higher_order_risk(n, beta, d).unwrap().value
}

fn independent_sum(x: &DiscreteDistribution, y: &DiscreteDistribution) -> DiscreteDistribution {
    let pairs: Vec<(f64, f64)> = x
        .atoms()
        .flat_map(|(a, p)| y.atoms().map(move |(b, q)| (a + b, p * q)))
        .collect();
    DiscreteDistribution::from_atoms(&pairs).unwrap()
}

fn sample_norms(g: &mut Gen) -> Vec<NormSpec> {
    vec![
        NormSpec::Holder(1.0),
        NormSpec::Holder(1.5 + 2.0 * g.uniform()),
        NormSpec::Holder(f64::INFINITY),
        NormSpec::Spectral(g.mixture()),
        NormSpec::Expectile(0.5 + 0.45 * g.uniform()),
    ]
}

#[test]
fn subadditive_under_three_couplings() {
    let mut g = Gen::from_env("subadditivity");
    for i in 0..80 {
        let (nx, ny) = (1 + g.below(6), 1 + g.below(6));
        let x = g.distribution_with(nx);
        let y = g.distribution_with(ny);
        let beta = g.beta();
        let sums = [
            x.comonotone_with(&y, |a, b| a + b),
            x.comonotone_with(&y.negate(), |a, b| a - b),
            independent_sum(&x, &y),
        ];
        for n in sample_norms(&mut g) {
            let bound = risk(&n, beta, &x) + risk(&n, beta, &y);
            for s in &sums {
                let r = risk(&n, beta, s);
                assert!(r <= bound + 1e-9 * (1.0 + bound.abs()), "instance {i}, {n:?}, β {beta}: {r} > {bound}");
            }
        }
    }
}

#[test]
fn comonotone_sums_are_additive_for_spectral_norms() {
    let mut g = Gen::from_env("comonotone additivity");
    for _ in 0..100 {
        let (x, y, beta) = (g.distribution(), g.distribution(), g.beta());
        let n = NormSpec::Spectral(g.mixture());
        let s = x.comonotone_with(&y, |a, b| a + b);
        let gap = risk(&n, beta, &s) - risk(&n, beta, &x) - risk(&n, beta, &y);
        assert!(gap.abs() <= 1e-9, "gap {gap}");
    }
}

#[test]
fn dominance_cone_is_convex() {
    let mut g = Gen::from_env("cone convexity");
    let mut checked = 0;
    for i in 0..150 {
        let (x, y0) = g.spread_pair();
        let z = g.distribution();
        let y1 = if g.below(2) == 0 {
            y0.comonotone_with(&z, |a, b| a + b.abs())
        } else {
            DiscreteDistribution::point(y0.mean()).unwrap()
        };
        for n in [NormSpec::Holder(1.0), NormSpec::Spectral(g.mixture())] {
            if !(verify_dominance(&x, &y0, &n).unwrap().holds() && verify_dominance(&x, &y1, &n).unwrap().holds()) {
                continue;
            }
            for lambda in [0.25, 0.5, 0.75] {
                let mix = y0.comonotone_with(&y1, |a, b| (1.0 - lambda) * a + lambda * b);
                let v = verify_dominance(&x, &mix, &n).unwrap();
                assert!(v.holds(), "instance {i}, {n:?}, λ {lambda}: margin {}", v.margin);
            }
            checked += 1;
        }
    }
    assert!(checked > 50, "only {checked} dominated pairs");
}

#[test]
fn pointwise_difference_condition_implies_dominance() {
    let mut g = Gen::from_env("difference condition");
    let levels: Vec<f64> = (0..20).map(|k| k as f64 * 0.05).chain([1.0 - 1e-6]).collect();
    let mut implied = 0;
    for i in 0..300 {
        let x = g.distribution();
        let y = if g.below(2) == 0 {
            let z = g.distribution();
            x.comonotone_with(&z, |a, b| a + 0.25 * b.abs())
        } else {
            g.distribution()
        };
        let diff = x.comonotone_with(&y, |a, b| a - b);
        for n in [NormSpec::Holder(1.0), NormSpec::Holder(2.0), NormSpec::Spectral(g.mixture())] {
            if levels.iter().all(|&b| risk(&n, b, &diff) <= 0.0) {
                let v = verify_dominance(&x, &y, &n).unwrap();
                assert_eq!(v.outcome, Outcome::Yes, "instance {i}, {n:?}: margin {}", v.margin);
                implied += 1;
            }
        }
    }
    assert!(implied > 100, "only {implied} instances met the condition");
}

#[test]
fn reflexive_and_translation_monotone() {
    let mut g = Gen::from_env("reflexivity");
    for _ in 0..100 {
        let x = g.distribution();
        let c = 0.5 * g.below(5) as f64;
        let m = g.mixture();
        for n in [NormSpec::Holder(1.0), NormSpec::Holder(2.0), NormSpec::Spectral(m.clone())] {
            assert!(verify_dominance(&x, &x, &n).unwrap().holds());
            assert!(verify_dominance(&x, &x.shift(c), &n).unwrap().holds());
        }
        assert!(spectral_order(&x, &x.shift(c), &m).holds());
    }
}

#[test]
fn expectile_equals_supremum_over_kusuoka_family() {
    let mut g = Gen::from_env("expectile family");
    for i in 0..150 {
        let d = g.distribution();
        let alpha = 0.5 + 0.45 * g.uniform();
        let beta = g.beta();
        let params = ExpectileParams::risk(alpha).unwrap();
        let family: Vec<KusuokaMixture> = higher_order_gamma_points(alpha, beta, &d)
            .unwrap()
            .into_iter()
            .map(|gamma| params.kusuoka_member(gamma).unwrap())
            .collect();
        let sup = risk(&NormSpec::KusuokaSup(family), beta, &d);
        let direct = higher_order_expectile(alpha, beta, &d).unwrap();
        assert!((sup - direct).abs() <= 1e-8, "instance {i}: sup {sup} vs {direct}");
    }
}

#[test]
fn generic_solver_matches_grid_oracle() {
    let mut g = Gen::from_env("grid oracle");
    let grid = wide_grid();
    for i in 0..200 {
        let (d, beta) = (g.distribution(), g.beta());
        for n in sample_norms(&mut g) {
            let r = higher_order_risk(&n, beta, &d).unwrap();
            let brute = grid_min_higher_order(&n, beta, &d, &grid).unwrap();
            assert!(r.value <= brute + 1e-9, "instance {i}, {n:?}, β {beta}: {} above grid {brute}", r.value);
            // the oracle can only see minimizers inside its grid
            if r.t_star > grid.lo + 1.0 {
                assert!((r.value - brute).abs() <= 1e-8, "instance {i}, {n:?}, β {beta}: {} vs {brute}", r.value);
            }
        }
    }
}

#[test]
fn sweep_agrees_for_smooth_norms_on_clear_verdicts() {
    let mut g = Gen::from_env("smooth sweep");
    let grid = wide_grid();
    for i in 0..150 {
        let (x, y) = g.dominance_pair();
        let n = NormSpec::Holder(2.0);
        let verified = verify_dominance(&x, &y, &n).unwrap();
        let swept = dense_dominance_sweep(&x, &y, &n, &grid).unwrap();
        if verified.outcome != Outcome::Undetermined && swept.margin.abs() > 1e-6 {
            assert_eq!(verified.outcome, swept.outcome, "pair {i}: margins {} / {}", verified.margin, swept.margin);
        }
    }
}

#[test]
fn avar_profile_composes() {
    let mut g = Gen::from_env("avar profile");
    for _ in 0..100 {
        let d = g.distribution();
        let (a, b) = (g.beta(), g.beta());
        let n = NormSpec::Spectral(KusuokaMixture::avar_level(a).unwrap());
        let composed = risk(&n, b, &d);
        assert!((composed - avar(1.0 - (1.0 - a) * (1.0 - b), &d).unwrap()).abs() <= 1e-12);
    }
}
