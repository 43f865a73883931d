//! Monte-Carlo checks of the test calibration and of how clustering error
//! behaves as graphs grow.

use graphon_dist::clustering::{dsc, ssdp};
use graphon_dist::graphon::{sample_graph, sample_labeled_population, Builtin, Graphon};
use graphon_dist::numerics::misclustered;
use graphon_dist::rng::derive_seed_path;
use graphon_dist::transform::{default_n0, graph_distance};
use graphon_dist::twosample::{
    bootstrap_from_model, bootstrap_null, outcome_from_null, rejection_rate, upper_quantile,
    BootstrapSource, PowerSettings,
};

fn w(b: Builtin) -> Graphon {
    b.into()
}

#[test]
fn oracle_null_controls_type_one_error() {
    let model = w(Builtin::W1);
    let trials = 500u64;
    let mut rejections = 0;
    for t in 0..trials {
        let g1 = sample_graph(&model, 100, derive_seed_path(31, &[t, 0])).unwrap();
        let g2 = sample_graph(&model, 200, derive_seed_path(31, &[t, 1])).unwrap();
        let stat = graph_distance(&g1, &g2, 10).unwrap();
        // fresh pairs from the true graphon replace the bootstrap
        let null =
            bootstrap_from_model(&model, 100, 200, 10, 100, derive_seed_path(31, &[t, 2])).unwrap();
        rejections += usize::from(outcome_from_null(stat, null, 10, 0.05).reject);
    }
    let rate = rejections as f64 / trials as f64;
    assert!((0.02..=0.10).contains(&rate), "type-I rate {rate}");
}

#[test]
fn bootstrap_quantile_is_in_sanity_band() {
    let g1 = sample_graph(&w(Builtin::W1), 100, 5).unwrap();
    let null = bootstrap_null(&g1, 200, 10, 100, 6).unwrap();
    let q = upper_quantile(&null, 0.05);
    assert!((0.02..=0.5).contains(&q), "95th percentile {q}");
    assert!(null.windows(2).all(|p| p[0] <= p[1]));
}

#[test]
fn power_grows_with_graph_size() {
    let powers: Vec<f64> = [50usize, 100, 150]
        .iter()
        .map(|&n| {
            let settings = PowerSettings {
                n,
                n0: 10,
                trials: 100,
                bootstrap: 100,
                alpha: 0.05,
                seed: 0,
                source: BootstrapSource::First,
            };
            rejection_rate(&w(Builtin::W1), &w(Builtin::W4), &settings, 77).unwrap()
        })
        .collect();
    assert!(powers.windows(2).all(|p| p[1] >= p[0]), "{powers:?}");
}

#[test]
fn pooled_bootstrap_keeps_power() {
    let settings = PowerSettings {
        n: 100,
        n0: 10,
        trials: 40,
        bootstrap: 50,
        alpha: 0.05,
        seed: 0,
        source: BootstrapSource::Pooled,
    };
    let power = rejection_rate(&w(Builtin::W1), &w(Builtin::W4), &settings, 3).unwrap();
    assert!(power >= 0.8, "{power}");
}

/// Mean misclustering over five seeds for two equal clusters of size-`n` graphs.
fn mean_error(
    n: usize,
    per: usize,
    cluster: impl Fn(&[graphon_dist::Graph], u64) -> Vec<usize>,
) -> f64 {
    let graphons = [w(Builtin::W2), w(Builtin::W3)];
    let total: usize = (0..5u64)
        .map(|seed| {
            let (graphs, truth) =
                sample_labeled_population(&graphons, per, n, n, seed + 40).unwrap();
            misclustered(&truth, &cluster(&graphs, seed)).unwrap()
        })
        .sum();
    total as f64 / (5 * 2 * per) as f64
}

#[test]
fn dsc_error_shrinks_with_graph_size() {
    let run = |n: usize| {
        mean_error(n, 10, |g, s| {
            dsc(g, 2, default_n0(n), s).unwrap().labels().to_vec()
        })
    };
    let (small, large) = (run(100), run(400));
    assert!(large <= small, "n=100: {small}, n=400: {large}");
}

#[test]
fn ssdp_error_shrinks_with_graph_size() {
    let run = |n: usize| {
        mean_error(n, 4, |g, s| {
            ssdp(g, 2, default_n0(n), s).unwrap().labels().to_vec()
        })
    };
    let (small, large) = (run(100), run(1600));
    assert!(large <= small, "n=100: {small}, n=1600: {large}");
}
