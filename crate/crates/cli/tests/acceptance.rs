//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use sprt_efficiency::design::expected_stop_time;
use sprt_efficiency::efficiency::{
    alpha_for_reduction, f_asymptotic, relative_efficiency, relative_efficiency_asym,
};
use sprt_efficiency::inequality::{scan, Verifier};
use sprt_efficiency::simulator::simulate_sprt;
use sprt_efficiency::special::{normal_cdf, normal_quantile};
use sprt_efficiency::{ErrorSpec, Hypothesis, SignalSpec, SimConfig};

struct Check {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, Option<Duration>, fn() -> Check);

fn check(pass: bool, detail: String) -> Check {
    Check { pass, detail }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Check) -> (Check, Duration) {
    let start = Instant::now();
    let mut c = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            c.pass = false;
            c.detail.push_str(&format!("; over the {:?} budget", limit));
        }
    }
    (c, took)
}

fn table() -> Check {
    let rows = [
        (0.2, "0.5871", "41.29"),
        (0.1, "0.5351", "46.49"),
        (0.05, "0.4897", "51.03"),
        (0.01, "0.4160", "58.40"),
        (0.001, "0.3609", "63.91"),
    ];
    let mut got = Vec::new();
    let mut pass = true;
    for (alpha, f_want, red_want) in rows {
        let f = relative_efficiency(alpha).unwrap();
        let (f_s, red_s) = (format!("{f:.4}"), format!("{:.2}", 100.0 * (1.0 - f)));
        pass &= f_s == f_want && red_s == red_want;
        got.push(format!("{f_s}/{red_s}%"));
    }
    check(pass, got.join(" "))
}

#[allow(clippy::approx_constant)]
fn bounds_and_monotonicity() -> Check {
    let bounds = scan(Verifier::Bounds, &Verifier::Bounds.default_grid()).unwrap();
    let mono = scan(Verifier::Monotone, &Verifier::Monotone.default_grid()).unwrap();
    let tiny = relative_efficiency(1e-100).unwrap();
    let near_half = relative_efficiency(0.5 - 1e-9).unwrap();
    check(
        bounds.points == 10_000
            && bounds.passed()
            && mono.passed()
            && mono.min_margin > 0.0
            && tiny < 0.26
            && near_half > 0.6366,
        format!(
            "min bound margin {:.3e}, min forward difference {:.3e}, f(1e-100) = {tiny:.6}, f(1/2 - 1e-9) = {near_half:.10}",
            bounds.min_margin, mono.min_margin
        ),
    )
}

fn dominance() -> Check {
    let r = scan(Verifier::Dominance, &Verifier::Dominance.default_grid()).unwrap();
    check(
        r.points == 40_000 && r.min_margin >= -1e-12,
        format!(
            "min F - f(min) = {:.3e} at {} over {} points",
            r.min_margin, r.argmin, r.points
        ),
    )
}

fn verify_all() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_sprteff"))
        .args(["verify", "--suite", "all"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let reports = text.lines().count();
    let clean = text
        .lines()
        .filter(|l| l.ends_with(" 0 violations"))
        .count();
    check(
        out.status.success() && reports > 0 && clean == reports,
        format!(
            "{clean}/{reports} scans without violations, exit {:?}",
            out.status.code()
        ),
    )
}

fn asymptotics() -> Check {
    let alphas = [1e-10, 1e-20, 1e-40, 1e-60];
    let residuals: Vec<f64> = alphas
        .iter()
        .map(|&a| (relative_efficiency(a).unwrap() - f_asymptotic(a).unwrap()).abs())
        .collect();
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let a = 1e-40f64;
    let rescaled = (relative_efficiency(a).unwrap() - f_asymptotic(a).unwrap()) * 8.0 * -a.ln();
    let target = (4.0 * PI).ln();
    check(
        decreasing && (rescaled - target).abs() <= 0.35,
        format!(
            "residuals {:.3e} {:.3e} {:.3e} {:.3e}; r(1e-40) = {rescaled:.5} vs ln(4 pi) = {target:.5}",
            residuals[0], residuals[1], residuals[2], residuals[3]
        ),
    )
}

fn inverse_anchors() -> Check {
    let mut pass = true;
    let mut got = Vec::new();
    for (target, anchor) in [(0.70, 2e-7), (0.72, 2e-12), (0.74, 2e-40)] {
        let alpha = alpha_for_reduction(target).unwrap();
        pass &= alpha >= anchor / 3.0 && alpha <= anchor * 3.0;
        got.push(format!("{target} -> {alpha:.4e}"));
    }
    check(pass, got.join(", "))
}

fn asymmetric_remark() -> Check {
    let far = relative_efficiency_asym(0.1, 1e-12).unwrap();
    let near = relative_efficiency_asym(0.02, 1e-6).unwrap();
    let far_ok = (0.88..=0.92).contains(&far);
    let near_ok = (near - 0.58014).abs() <= 5e-5 && near > 17.0 / 30.0;
    check(
        far_ok && near_ok,
        format!(
            "F(0.1, 1e-12) = {far:.6} (needs [0.88, 0.92]: {}); F(0.02, 1e-6) = {near:.6} > 17/30 ({})",
            if far_ok { "ok" } else { "no" },
            if near_ok { "ok" } else { "no" }
        ),
    )
}

fn monte_carlo() -> Check {
    let sym = ErrorSpec::symmetric(0.05).unwrap();
    let a = simulate_sprt(
        &SimConfig::new(sym, Hypothesis::Positive)
            .step(1e-4)
            .paths(100_000)
            .seed(1),
    )
    .unwrap();
    let asym = ErrorSpec::new(0.02, 1e-6).unwrap();
    let b = simulate_sprt(
        &SimConfig::new(asym, Hypothesis::Negative)
            .step(1e-4)
            .paths(100_000)
            .seed(1),
    )
    .unwrap();
    let b_target = expected_stop_time(&asym, Hypothesis::Negative);
    let b_tol = (3.0 * b.se_stop).max(0.05);
    check(
        (a.mean_stop - 1.3250).abs() <= 0.02
            && (a.error_rate - 0.05).abs() <= 0.005
            && (b.mean_stop - 6.7206).abs() <= b_tol,
        format!(
            "symmetric: mean {:.4} (se {:.4}), error rate {:.4}; asymmetric: mean {:.4} (se {:.4}) vs {b_target:.4}",
            a.mean_stop, a.se_stop, a.error_rate, b.mean_stop, b.se_stop
        ),
    )
}

fn snr_scaling() -> Check {
    let spec = ErrorSpec::symmetric(0.05).unwrap();
    let cfg = SimConfig::new(spec, Hypothesis::Positive)
        .signal(SignalSpec::new(1.0, 2.0).unwrap())
        .paths(20_000)
        .seed(1);
    let r = simulate_sprt(&cfg).unwrap();
    check(
        (r.mean_stop - 5.300).abs() <= 2.0 * r.se_stop,
        format!("mean {:.4} (se {:.4}) vs 5.300", r.mean_stop, r.se_stop),
    )
}

fn quantile_reference() -> Check {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data/normal_quantile_reference.csv");
    let mut reader = csv::Reader::from_path(path).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut has_tiny = false;
    for record in reader.records() {
        let p: f64 = record.unwrap()[0].parse().unwrap();
        let z = normal_quantile(p).unwrap();
        worst = worst.max((normal_cdf(z) - p).abs() / p.min(1.0 - p));
        has_tiny |= p == 1e-40;
        count += 1;
    }
    check(
        count >= 50 && has_tiny && worst <= 1e-12,
        format!("{count} pairs, worst relative round-trip error {worst:.3e}"),
    )
}

fn determinism() -> Check {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_sprteff"))
            .args(args)
            .output()
            .unwrap()
    };
    let curve = [
        "curve",
        "--log",
        "--alpha-min",
        "1e-12",
        "--alpha-max",
        "0.4",
        "--points",
        "300",
    ];
    let surface = ["surface", "--grid", "40"];
    let sim = [
        "simulate", "--alpha", "0.05", "--step", "1e-3", "--paths", "3000", "--seed", "42",
    ];
    let mut same = 0;
    let cases: [(Vec<&str>, Vec<&str>); 4] = [
        (curve.to_vec(), curve.to_vec()),
        (surface.to_vec(), surface.to_vec()),
        (
            [&sim[..], &["--workers", "1"]].concat(),
            [&sim[..], &["--workers", "1"]].concat(),
        ),
        (
            [&sim[..], &["--workers", "1"]].concat(),
            [&sim[..], &["--workers", "8"]].concat(),
        ),
    ];
    for (a, b) in &cases {
        let (x, y) = (run(a), run(b));
        if x.status.success() && !x.stdout.is_empty() && x.stdout == y.stdout {
            same += 1;
        }
    }
    check(
        same == cases.len(),
        format!("{same}/{} output pairs byte-identical", cases.len()),
    )
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        ("efficiency table", Some(s(1)), table),
        (
            "bounds and monotonicity",
            Some(s(5)),
            bounds_and_monotonicity,
        ),
        ("asymmetric dominance", Some(s(10)), dominance),
        ("inequality scans", Some(s(30)), verify_all),
        ("small-alpha asymptotics", None, asymptotics),
        ("reduction anchors", None, inverse_anchors),
        ("asymmetric extremes", None, asymmetric_remark),
        ("Monte Carlo vs closed forms", Some(s(300)), monte_carlo),
        ("signal-to-noise scaling", None, snr_scaling),
        ("quantile reference", None, quantile_reference),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (c, took) = timed(limit, f);
        failed += usize::from(!c.pass);
        println!(
            "{} {:>2} {name} ({:.2}s): {}",
            if c.pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            c.detail
        );
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
