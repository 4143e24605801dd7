use std::fmt::Write as _;

use sprt_efficiency::efficiency::{
    alpha_for_reduction, curve, f_asymptotic, relative_efficiency, surface,
};
use sprt_efficiency::inequality::{scan, Verifier};
use sprt_efficiency::simulator::run_comparison;
use sprt_efficiency::{Axis, ErrorSpec, Hypothesis, SignalSpec, SimConfig};

use crate::error::CliError;

/// What a command produced: the data (stdout or `--out`), a note for
/// stderr, and the number of failed checks.
#[derive(Debug, Default)]
pub struct Output {
    pub data: String,
    pub note: String,
    pub violations: usize,
}

impl Output {
    fn data(data: String) -> Self {
        Output {
            data,
            ..Output::default()
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

// Power as printed, paired with α = 1 − power.
const TABLE_ROWS: [(&str, f64); 5] = [
    ("0.80", 0.2),
    ("0.90", 0.1),
    ("0.95", 0.05),
    ("0.99", 0.01),
    ("0.999", 0.001),
];

pub fn table() -> Result<Output> {
    let mut out = String::from("power, f, reduction\n");
    for (power, alpha) in TABLE_ROWS {
        let f = relative_efficiency(alpha)?;
        writeln!(out, "{power}, {f:.4}, {:.2}%", 100.0 * (1.0 - f)).unwrap();
    }
    Ok(Output::data(out))
}

fn axis(min: f64, max: f64, points: usize, log: bool) -> Result<Axis> {
    if !(min > 0.0 && min < max && max < 0.5) {
        return Err(CliError::Usage(format!(
            "need 0 < alpha-min < alpha-max < 0.5, got [{min}, {max}]"
        )));
    }
    if points < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 points, got {points}"
        )));
    }
    Ok(if log {
        Axis::log(min, max, points)
    } else {
        Axis::linear(min, max, points)
    })
}

pub fn curve_csv(min: f64, max: f64, points: usize, log: bool) -> Result<Output> {
    let mut out = String::from("alpha,f,reduction\n");
    for p in curve(&axis(min, max, points, log)?)? {
        writeln!(out, "{:e},{:.15},{:.15}", p.alpha, p.value, p.reduction).unwrap();
    }
    Ok(Output::data(out))
}

pub fn surface_csv(min: f64, max: f64, grid: usize, log: bool) -> Result<Output> {
    let axis = axis(min, max, grid, log)?;
    let mut out = String::from("alpha,beta,F\n");
    for p in surface(&axis, &axis)? {
        writeln!(out, "{:e},{:e},{:.15}", p.alpha, p.beta, p.value).unwrap();
    }
    Ok(Output::data(out))
}

pub fn asymp_csv(alphas: &[f64]) -> Result<Output> {
    let mut out = String::from("alpha,f,f_asymp,residual\n");
    for &alpha in alphas {
        let f = relative_efficiency(alpha)?;
        let fa = f_asymptotic(alpha)?;
        writeln!(out, "{alpha:e},{f:.15},{fa:.15},{:.6e}", f - fa).unwrap();
    }
    Ok(Output::data(out))
}

pub fn suite(name: &str) -> Vec<Verifier> {
    match name {
        "mills" => vec![Verifier::Mills],
        "twodim" => vec![Verifier::TwoDim],
        "disc" => vec![Verifier::Disc],
        "omega-max" => vec![Verifier::OmegaMax],
        "monotone" => vec![Verifier::Monotone],
        "bounds" => vec![Verifier::Bounds],
        "theorem2" => vec![
            Verifier::Dominance,
            Verifier::DominanceSlice { beta: 0.01 },
            Verifier::DominanceSlice { beta: 0.1 },
            Verifier::DominanceSlice { beta: 0.3 },
        ],
        _ => [
            "mills",
            "twodim",
            "disc",
            "omega-max",
            "monotone",
            "bounds",
            "theorem2",
        ]
        .iter()
        .flat_map(|s| suite(s))
        .collect(),
    }
}

pub fn verify(name: &str) -> Result<Output> {
    let mut out = Output::default();
    for v in suite(name) {
        let report = scan(v, &v.default_grid())?;
        out.violations += report.violations;
        out.data.push_str(&report.summary());
        out.data.push('\n');
    }
    Ok(out)
}

pub fn solve(reduction: f64) -> Result<Output> {
    let alpha = alpha_for_reduction(reduction)?;
    Ok(Output::data(format!("{alpha:.5e}\n")))
}

pub struct SimulateArgs {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub step: f64,
    pub paths: u64,
    pub seed: u64,
    pub mu: f64,
    pub sigma: f64,
    pub bridge: bool,
    pub workers: Option<usize>,
}

pub fn simulate(args: &SimulateArgs) -> Result<Output> {
    let spec = ErrorSpec::new(args.alpha, args.beta.unwrap_or(args.alpha))?;
    let mut config = SimConfig::new(spec, Hypothesis::Positive)
        .signal(SignalSpec::new(args.mu, args.sigma)?)
        .step(args.step)
        .paths(args.paths)
        .seed(args.seed)
        .bridge(args.bridge);
    config.workers = args.workers;
    let report = run_comparison(&config)?;
    let note = format!(
        "alpha {} beta {}: horizon {:.6}, f_hat {:.6}, exact {:.6}, deviation {:+.6}\n",
        spec.alpha(),
        spec.beta(),
        report.horizon,
        report.f_hat,
        report.f_exact,
        report.deviation()
    );
    Ok(Output {
        data: report.csv(),
        note,
        violations: 0,
    })
}
