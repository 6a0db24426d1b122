use flarecount::counts::{from_events, Frequencies};
use flarecount::estimators::{
    ambartsumian_bounds, estimate_all, heterogeneity_sequence, mle_total, zelterman_total,
    EstimatorId, RateSource,
};
use flarecount::predictors::{estimate_curve, uniform_grid};
use flarecount::simulator::{expected_table, run_experiment, simulate_log, MixtureSpec, SimConfig};

fn config(mixture: &str, population: u64, replications: u64, seed: u64) -> SimConfig {
    SimConfig {
        population,
        horizon: 1.0,
        mixture: mixture.parse().unwrap(),
        replications,
        seed,
    }
}

#[test]
fn simulated_counts_match_expected_table() {
    let c = config("gamma:2,2", 100_000, 1, 11);
    let log = simulate_log(&c, 0).unwrap();
    let observed = from_events(&log, 1.0).unwrap();
    let expected = expected_table(&c.mixture, 100_000.0, 1.0, 8).unwrap();
    for k in 1..=8 {
        let e = expected.count(k);
        let sigma = (e * (1.0 - e / 100_000.0)).sqrt();
        let o = observed.get(k) as f64;
        assert!(
            (o - e).abs() < 4.0 * sigma,
            "k = {k}: observed {o}, expected {e:.1}"
        );
    }
    let unseen = 100_000.0 - log.subjects() as f64;
    let sigma = (expected.true_unseen * (1.0 - expected.true_unseen / 100_000.0)).sqrt();
    assert!((unseen - expected.true_unseen).abs() < 4.0 * sigma);
}

#[test]
fn poisson_expectations_are_recovered_exactly() {
    for nu in [0.3, 1.0, 2.5] {
        let mix = MixtureSpec::point(nu).unwrap();
        let table = expected_table(&mix, 1000.0, 1.0, 1).unwrap();
        let (_, total) = mle_total(&table).unwrap();
        assert!(
            (total.value - 1000.0).abs() < 1e-8,
            "nu = {nu}: {}",
            total.value
        );
        let z = zelterman_total(&table, RateSource::Conventional).unwrap();
        assert!((z.value - 1000.0).abs() < 1e-8);
        let (lower, upper) = ambartsumian_bounds(&table).unwrap();
        assert!((lower.value - table.true_unseen).abs() < 1e-9);
        assert!(upper.value >= table.true_unseen);
    }
}

#[test]
fn heterogeneity_trend_separates_mixtures() {
    let flat = expected_table(&"point:1.5".parse().unwrap(), 1000.0, 1.0, 1).unwrap();
    let h = heterogeneity_sequence(&flat).unwrap();
    assert!(h.trend.abs() < 1e-9);
    for &(_, r) in h.sequence.iter().take(10) {
        assert!((r - 1.5).abs() < 1e-9);
    }

    let (alpha, beta, t) = (2.0, 2.0, 1.0);
    let mixed = expected_table(&MixtureSpec::gamma(alpha, beta).unwrap(), 1000.0, t, 1).unwrap();
    let h = heterogeneity_sequence(&mixed).unwrap();
    assert!((h.trend - t / (beta + t)).abs() < 1e-9, "trend {}", h.trend);
}

#[test]
fn expected_table_runs_through_every_estimator() {
    let table = expected_table(&"discrete:0.2,0.5;2,0.5".parse().unwrap(), 1000.0, 1.0, 1).unwrap();
    let report = estimate_all(&table);
    let blocked: Vec<_> = report.inapplicable.iter().map(|b| b.estimator).collect();
    assert_eq!(blocked, vec![EstimatorId::StirlingTotal]);
    for e in &report.estimates {
        assert!(e.value.is_finite(), "{}", e.estimator);
    }
}

#[test]
fn replay_curve_approaches_truth() {
    let c = config("point:2", 2000, 1, 3);
    let log = simulate_log(&c, 0).unwrap();
    let curve = estimate_curve(&log, &uniform_grid(1.0, 10), EstimatorId::MleTotal).unwrap();
    let last = curve.points.last().unwrap().value.unwrap();
    let first = curve.points[0].value.unwrap();
    assert!((last - 2000.0).abs() < (first - 2000.0).abs() + 100.0);
    assert!((last / 2000.0 - 1.0).abs() < 0.05);
}

#[test]
fn upper_bound_holds_for_exponential_mixture() {
    let c = config("exp:1", 1000, 200, 5);
    let report = run_experiment(
        &c,
        &[EstimatorId::Ambartsumian, EstimatorId::AmbartsumianUpper],
    )
    .unwrap();
    let lower = report.row(EstimatorId::Ambartsumian).unwrap().mean.unwrap();
    let upper = report
        .row(EstimatorId::AmbartsumianUpper)
        .unwrap()
        .mean
        .unwrap();
    assert!(lower < report.mean_true_unseen);
    assert!((upper / report.mean_true_unseen - 1.0).abs() < 0.1);
}
