use sprt_efficiency::design::{expected_stop_time, SignalSpec};
use sprt_efficiency::simulator::{run_comparison, simulate_fixed, simulate_sprt};
use sprt_efficiency::{ErrorSpec, Hypothesis, SimConfig};

fn sym(alpha: f64) -> ErrorSpec {
    ErrorSpec::symmetric(alpha).unwrap()
}

#[test]
fn discretisation_bias_and_bridge_correction() {
    let spec = sym(0.05);
    let target = expected_stop_time(&spec, Hypothesis::Positive);
    let base = SimConfig::new(spec, Hypothesis::Positive)
        .paths(20_000)
        .seed(11);
    let mut previous_gap = f64::INFINITY;
    let mut previous_bias = f64::INFINITY;
    for step in [1e-2, 1e-3, 1e-4] {
        let on = simulate_sprt(&base.clone().step(step).bridge(true)).unwrap();
        let off = simulate_sprt(&base.clone().step(step).bridge(false)).unwrap();
        // same increments: without the bridge test exits come late and
        // less often
        assert!(off.mean_stop > on.mean_stop, "h = {step}");
        assert!(off.error_rate <= on.error_rate, "h = {step}");
        // the overshoot bias shrinks like √h
        let bias = off.mean_stop - on.mean_stop;
        let shrink = previous_bias / bias;
        assert!(
            previous_bias.is_infinite() || (2.0..=5.0).contains(&shrink),
            "h = {step}: {shrink}"
        );
        previous_bias = bias;
        if step >= 1e-3 {
            assert!(off.mean_stop - target > 2.0 * off.se_stop, "h = {step}");
        }
        if step >= 1e-2 {
            assert!(0.05 - off.error_rate > 3.0 * (0.05f64 * 0.95 / 20_000.0).sqrt());
        }
        let gap = (on.mean_stop - target).abs();
        assert!(gap <= previous_gap + 2.0 * on.se_stop, "h = {step}: {gap}");
        previous_gap = gap;
    }
}

#[test]
fn snr_scaling_multiplies_times() {
    let spec = sym(0.05);
    let unit = expected_stop_time(&spec, Hypothesis::Positive);
    let signal = SignalSpec::new(1.0, 2.0).unwrap();
    let cfg = SimConfig::new(spec, Hypothesis::Positive)
        .signal(signal)
        .step(4e-3)
        .paths(10_000)
        .seed(5);
    let r = simulate_sprt(&cfg).unwrap();
    assert!(
        (r.mean_stop - 4.0 * unit).abs() <= 3.0 * r.se_stop + 0.01,
        "{r:?}"
    );
    let fixed = simulate_fixed(&cfg).unwrap();
    assert_eq!(fixed.mean_stop, 4.0 * 1.6448536269514727f64.powi(2));
}

#[test]
fn fixed_test_hits_tiny_error_rate() {
    let spec = ErrorSpec::new(0.02, 1e-6).unwrap();
    let r = simulate_fixed(&SimConfig::new(spec, Hypothesis::Positive).paths(10_000_000)).unwrap();
    // binomial 3σ around 10 expected events
    let sd = (1e7f64 * 1e-6).sqrt();
    assert!((r.n_wrong as f64 - 10.0).abs() <= 3.0 * sd, "{}", r.n_wrong);
}

#[test]
fn comparison_reports_empirical_efficiency() {
    let template = SimConfig::new(sym(0.2), Hypothesis::Positive)
        .step(1e-3)
        .paths(20_000)
        .seed(2);
    let report = run_comparison(&template).unwrap();
    assert!(report.deviation().abs() <= 0.02, "{report:?}");
    assert_eq!(report.csv().lines().count(), 5);
}
