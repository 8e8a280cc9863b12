use num_rational::Ratio;
use proptest::prelude::*;
use tcm_core::estimate::{
    beta_from_moments, bias_stats, fit_model3_node_dist, joint_bias_stats, one_step_survival, v1, z1, zbar,
    RelativeErrorSummary,
};
use tcm_core::experiment::{initial_graph, replicate, try_replicate};
use tcm_core::netcore::DegreeLaw;
use tcm_core::stats::{mean, sample_sd, sample_variance};
use tcm_core::tcm::evolve;
use tcm_core::{BetaParams, Error, PersistenceModel, Window};

fn draws<F>(seed: u64, reps: usize, n: usize, model: PersistenceModel, steps: usize, f: F) -> Vec<f64>
where
    F: Fn(&[tcm_core::Graph]) -> f64 + Sync,
{
    replicate(seed, reps, |_, rng| {
        let g = initial_graph(n, DegreeLaw::Poisson(6.0), rng).unwrap();
        f(evolve(g, model, steps, rng).unwrap().snapshots())
    })
}

#[test]
fn v1_targets_second_moment() {
    let w = BetaParams::new(1.0, 4.0).unwrap();
    let model = PersistenceModel::Model2 {
        dist: w,
        window: Window::Periodic(2),
    };
    let v = draws(1, 100, 1000, model, 2, |s| v1(s).unwrap());
    let se = sample_sd(&v) / 10.0;
    assert!((mean(&v) - 1.0 / 15.0).abs() < 3.0 * se, "mean v1 {} se {se}", mean(&v));

    let v = draws(2, 100, 1000, PersistenceModel::Model1 { p: 0.8 }, 2, |s| v1(s).unwrap());
    let se = sample_sd(&v) / 10.0;
    assert!((mean(&v) - 0.64).abs() < 3.0 * se, "mean v1 {}", mean(&v));
}

#[test]
fn zbar_variance_shrinks_like_one_over_t() {
    let t = 30;
    let pairs = replicate(3, 500, |_, rng| {
        let g = initial_graph(100, DegreeLaw::Poisson(6.0), rng).unwrap();
        let tn = evolve(g, PersistenceModel::Model1 { p: 0.8 }, t, rng).unwrap();
        (z1(tn.snapshots()).unwrap(), zbar(tn.snapshots(), 1).unwrap())
    });
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let ratio = sample_variance(&b) / sample_variance(&a) * t as f64;
    assert!((0.5..=2.0).contains(&ratio), "T·Var(zbar)/Var(z1) = {ratio}");
}

#[test]
fn estimates_agree_with_engine_counts() {
    let model = PersistenceModel::Model1 { p: 0.6 };
    let results = try_replicate(4, 10, |_, rng| {
        let g = initial_graph(500, DegreeLaw::Poisson(6.0), rng)?;
        let tn = evolve(g, model, 10, rng)?;
        let s = tn.snapshots();
        let from_stats: Vec<f64> = (1..=10)
            .map(|t| tn.step_stats(t).survived as f64 / s[t - 1].edge_count() as f64)
            .collect();
        Ok::<_, Error>((z1(s)?, zbar(s, 1)?, from_stats))
    })
    .unwrap();
    for (z, zb, stats) in results {
        assert_eq!(z, stats[0]);
        assert!((zb - mean(&stats)).abs() < 1e-15);
    }
}

#[test]
fn late_survivors_persist_more() {
    let model = PersistenceModel::Model2 {
        dist: BetaParams::new(4.0, 1.0).unwrap(),
        window: Window::Forever,
    };
    let pairs = replicate(5, 100, |_, rng| {
        let g = initial_graph(1000, DegreeLaw::Poisson(6.0), rng).unwrap();
        let tn = evolve(g, model, 100, rng).unwrap();
        let s = tn.snapshots();
        (one_step_survival(s, 0).unwrap(), one_step_survival(s, 99).unwrap())
    });
    let first = mean(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let late = mean(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    assert!(late > first, "late {late} vs first {first}");
}

#[test]
fn bias_stats_examples() {
    assert_eq!(bias_stats(&[(0.5, 0.5), (0.5, 0.5)]).unwrap(), (0.0, 0.0));
    let (b, _) = bias_stats(&[(0.9 * 0.4, 0.4), (1.1 * 0.4, 0.4)]).unwrap();
    assert!((b - 0.1).abs() < 1e-12);
    let s = RelativeErrorSummary::from_pairs(&[(0.9, 1.0), (1.1, 1.0)]).unwrap();
    assert!(s.abs_mean < 1e-12 && (s.mean_abs - 0.1).abs() < 1e-12);
    assert!(bias_stats(&[]).is_err());
    let (j, _) = joint_bias_stats(&[(1.1, 1.0)], &[(0.7, 1.0)]).unwrap();
    assert!((j - 0.2).abs() < 1e-12);
}

#[test]
fn exact_rational_round_trip() {
    type Q = Ratio<i128>;
    for (a, b) in [(1, 4), (2, 2), (7, 3), (1, 1), (50, 9)] {
        let w = BetaParams::new(Q::from_integer(a), Q::from_integer(b)).unwrap();
        let back = beta_from_moments(w.mean(), w.second_moment()).unwrap();
        assert_eq!(back, w);
    }
    let half = Q::new(1, 2);
    assert_eq!(
        beta_from_moments(half, Q::new(3, 10)).unwrap(),
        BetaParams::new(Q::from_integer(2), Q::from_integer(2)).unwrap()
    );
}

#[test]
fn published_fit_values_are_consistent() {
    // The edge-level law implies the Model 1 rate as its mean.
    let w2 = BetaParams::new(0.975f64, 1.074).unwrap();
    assert!((w2.mean() - 0.476).abs() < 5e-4);
    let back = beta_from_moments(w2.mean(), w2.second_moment()).unwrap();
    assert!((back.alpha - 0.975).abs() < 1e-9 && (back.beta - 1.074).abs() < 1e-9);
    // Fitting the node law from the same two ratios reproduces the
    // published alpha; the published beta does not follow from these moments.
    let w3 = fit_model3_node_dist(w2.mean(), w2.second_moment()).unwrap();
    assert!((w3.alpha - 1.171).abs() < 5e-3, "alpha {}", w3.alpha);
}

proptest! {
    #[test]
    fn beta_moments_round_trip(la in (0.1f64).ln()..(50.0f64).ln(), lb in (0.1f64).ln()..(50.0f64).ln()) {
        let w = BetaParams::new(la.exp(), lb.exp()).unwrap();
        let back = beta_from_moments(w.mean(), w.second_moment()).unwrap();
        prop_assert!(((back.alpha - w.alpha) / w.alpha).abs() < 1e-9);
        prop_assert!(((back.beta - w.beta) / w.beta).abs() < 1e-9);
    }

    #[test]
    fn node_fit_inverts_forward_moments(la in 0.2f64..20.0, lb in 0.2f64..20.0) {
        let w = BetaParams::new(la, lb).unwrap();
        let back = fit_model3_node_dist(w.mean().powi(2), w.second_moment().powi(2)).unwrap();
        prop_assert!(((back.alpha - la) / la).abs() < 1e-7);
        prop_assert!(((back.beta - lb) / lb).abs() < 1e-7);
    }

    #[test]
    fn infeasible_pairs_are_rejected(m1 in 0.01f64..0.99, frac in 0.0f64..1.0) {
        prop_assert!(beta_from_moments(m1, m1 * m1 * frac).is_err());
        prop_assert!(beta_from_moments(m1, m1 + (1.0 - m1) * frac + 1e-9).is_err());
    }

    #[test]
    fn ratios_are_ordered(seed in 0u64..1000, p in 0.05f64..0.95) {
        let mut rng = tcm_core::rng_from_seed(seed);
        let g = initial_graph(80, DegreeLaw::Poisson(4.0), &mut rng).unwrap();
        prop_assume!(!g.is_empty());
        let tn = evolve(g, PersistenceModel::Model1 { p }, 4, &mut rng).unwrap();
        let s = tn.snapshots();
        let (z, v) = (z1(s).unwrap(), v1(s).unwrap());
        prop_assert!((0.0..=1.0).contains(&z) && v <= z && v >= 0.0);
    }
}
