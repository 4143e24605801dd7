//! Monte Carlo check of the closed forms.
//!
//! The fixed-sample test is simulated exactly by drawing `X_T` directly.
//! The SPRT is simulated on a uniform time grid with exact Gaussian
//! increments; between grid points a Brownian-bridge test catches exits
//! the grid would miss.
//!
//! Path `i` draws its normals from ChaCha8 stream `2i` and its uniforms
//! from stream `2i + 1`, both keyed by the run seed, so a run with the
//! bridge switched off sees the same increments. Per-path results are
//! integers (stop times in half steps) and are summed exactly, so results
//! do not depend on the number of workers or the order paths finish in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::design::{
    expected_stop_time, fixed_design, snr_scale_factor, sprt_design, ErrorSpec, Hypothesis,
    SignalSpec,
};
use crate::efficiency::{relative_efficiency, relative_efficiency_asym};
use crate::error::{Error, Result};

/// Bridge exponents above this are treated as no crossing (`p < 5e−18`).
const BRIDGE_CUTOFF: f64 = 40.0;
/// Default cap as a multiple of the expected stopping time.
const CAP_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: ErrorSpec,
    pub hypothesis: Hypothesis,
    pub signal: SignalSpec,
    /// Time step `h` in the time units of `signal`.
    pub step: f64,
    pub paths: u64,
    pub seed: u64,
    pub bridge_correction: bool,
    /// Paths still running at this time are capped. Defaults to 100 times
    /// the expected stopping time.
    pub max_time: Option<f64>,
    /// Report capped paths instead of failing the run.
    pub allow_capped: bool,
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl SimConfig {
    pub fn new(spec: ErrorSpec, hypothesis: Hypothesis) -> Self {
        SimConfig {
            spec,
            hypothesis,
            signal: SignalSpec::unit(),
            step: 1e-4,
            paths: 100_000,
            seed: 1,
            bridge_correction: true,
            max_time: None,
            allow_capped: false,
            workers: None,
        }
    }

    pub fn step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn paths(mut self, paths: u64) -> Self {
        self.paths = paths;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn bridge(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub fn signal(mut self, signal: SignalSpec) -> Self {
        self.signal = signal;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn hypothesis(mut self, hypothesis: Hypothesis) -> Self {
        self.hypothesis = hypothesis;
        self
    }

    /// Closed-form `E[τ]` in the time units of `signal`.
    pub fn expected_stop(&self) -> f64 {
        snr_scale_factor(&self.signal) * expected_stop_time(&self.spec, self.hypothesis)
    }

    fn cap(&self) -> f64 {
        self.max_time
            .unwrap_or_else(|| CAP_FACTOR * self.expected_stop())
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.paths == 0 {
            return Err(Error::Config("paths must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let floor = CAP_FACTOR * self.expected_stop();
        if let Some(cap) = self.max_time {
            if !(cap >= floor && cap.is_finite()) {
                return Err(Error::Config(format!(
                    "max_time {cap} is below {CAP_FACTOR} x the expected stopping time ({floor})"
                )));
            }
        }
        if self.cap() / self.step > (u64::MAX / 4) as f64 {
            return Err(Error::Config("max_time / step is too large".into()));
        }
        Ok(())
    }

    fn run_in_pool<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(|pool| pool.install(job))
                .map_err(|e| Error::Config(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Estimate of `E[τ]`; capped paths count at the cap.
    pub mean_stop: f64,
    /// Sample standard deviation of the stopping time over `√paths`.
    pub se_stop: f64,
    pub error_rate: f64,
    pub n_wrong: u64,
    pub n_capped: u64,
    pub paths: u64,
    /// Sum of stopping times in half steps.
    pub sum_half_steps: u128,
    pub sum_sq_half_steps: u128,
}

impl SimResult {
    pub const CSV_HEADER: &'static str = "mean_stop,se_stop,error_rate,n_wrong,n_capped,paths";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{:.8},{},{},{}",
            self.mean_stop, self.se_stop, self.error_rate, self.n_wrong, self.n_capped, self.paths
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    sum: u128,
    sum_sq: u128,
    wrong: u64,
    capped: u64,
    paths: u64,
}

impl Tally {
    fn one(half_steps: u64, decision: Option<Hypothesis>, truth: Hypothesis) -> Self {
        let k = half_steps as u128;
        Tally {
            sum: k,
            sum_sq: k * k,
            wrong: u64::from(decision.is_some_and(|d| d != truth)),
            capped: u64::from(decision.is_none()),
            paths: 1,
        }
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
            wrong: self.wrong + o.wrong,
            capped: self.capped + o.capped,
            paths: self.paths + o.paths,
        }
    }

    fn finish(self, half_step: f64) -> SimResult {
        let n = self.paths as u128;
        let mean = self.sum as f64 / self.paths as f64;
        let se = if n > 1 {
            // n·Σk² − (Σk)² is exact in integers
            let spread = (n * self.sum_sq - self.sum * self.sum) as f64;
            (spread / (n * (n - 1)) as f64).sqrt() / (self.paths as f64).sqrt()
        } else {
            0.0
        };
        SimResult {
            mean_stop: mean * half_step,
            se_stop: se * half_step,
            error_rate: self.wrong as f64 / self.paths as f64,
            n_wrong: self.wrong,
            n_capped: self.capped,
            paths: self.paths,
            sum_half_steps: self.sum,
            sum_sq_half_steps: self.sum_sq,
        }
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Probability that a Brownian bridge from `x0` to `x1` over time `h`
/// touches `level`: `exp(−2(level−x0)(level−x1)/h)`.
pub fn bridge_cross_prob(x0: f64, x1: f64, level: f64, h: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::domain("h", h, "(0, inf)"));
    }
    let d0 = level - x0;
    let d1 = level - x1;
    let side = d0 * d1;
    if side.is_nan() || side <= 0.0 {
        return Err(Error::domain("x1", x1, "same side of level as x0"));
    }
    Ok((-2.0 * d0 * d1 / h).exp())
}

/// Unit-model quantities for one SPRT path.
struct Walk {
    lower: f64,
    upper: f64,
    drift: f64,
    sd: f64,
    two_over_h: f64,
    max_steps: u64,
    bridge: bool,
}

impl Walk {
    /// Stop time in half steps and the decision, `None` if capped.
    fn run(&self, seed: u64, path: u64) -> (u64, Option<Hypothesis>) {
        let mut normals = stream(seed, 2 * path);
        let mut uniforms = stream(seed, 2 * path + 1);
        let mut x = 0.0;
        for k in 1..=self.max_steps {
            let z: f64 = normals.sample(StandardNormal);
            let next = x + self.drift + self.sd * z;
            if next >= self.upper {
                return (2 * k, Some(Hypothesis::Positive));
            }
            if next <= self.lower {
                return (2 * k, Some(Hypothesis::Negative));
            }
            if self.bridge {
                let up = self.two_over_h * (self.upper - x) * (self.upper - next);
                let down = self.two_over_h * (x - self.lower) * (next - self.lower);
                let p_up = if up < BRIDGE_CUTOFF { (-up).exp() } else { 0.0 };
                let p_down = if down < BRIDGE_CUTOFF {
                    (-down).exp()
                } else {
                    0.0
                };
                let hit_up = p_up > 0.0 && uniforms.random::<f64>() < p_up;
                let hit_down = p_down > 0.0 && uniforms.random::<f64>() < p_down;
                match (hit_up, hit_down) {
                    (false, false) => {}
                    (true, true) if p_down > p_up => {
                        return (2 * k - 1, Some(Hypothesis::Negative))
                    }
                    (true, _) => return (2 * k - 1, Some(Hypothesis::Positive)),
                    (false, true) => return (2 * k - 1, Some(Hypothesis::Negative)),
                }
            }
            x = next;
        }
        (2 * self.max_steps, None)
    }
}

fn check_capped(config: &SimConfig, result: SimResult) -> Result<SimResult> {
    if result.n_capped > 0 && !config.allow_capped {
        return Err(Error::Capped {
            capped: result.n_capped,
            paths: result.paths,
            max_time: config.cap(),
        });
    }
    Ok(result)
}

/// Simulates the SPRT for `config.spec` under `config.hypothesis`.
///
/// Times are reported in the units of `config.signal`: the unit model is
/// run with step `step·ρ²/4` and its times are scaled back by `4/ρ²`.
pub fn simulate_sprt(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let scale = snr_scale_factor(&config.signal);
    let h = config.step / scale;
    let design = sprt_design(&config.spec);
    let walk = Walk {
        lower: design.lower,
        upper: design.upper,
        drift: config.hypothesis.drift() * h,
        sd: h.sqrt(),
        two_over_h: 2.0 / h,
        max_steps: (config.cap() / config.step).ceil() as u64,
        bridge: config.bridge_correction,
    };
    let truth = config.hypothesis;
    let seed = config.seed;
    let tally = config.run_in_pool(|| {
        (0..config.paths)
            .into_par_iter()
            .map(|i| {
                let (k, d) = walk.run(seed, i);
                Tally::one(k, d, truth)
            })
            .reduce(Tally::default, Tally::merge)
    })?;
    check_capped(config, tally.finish(0.5 * config.step))
}

/// Simulates the fixed-sample test by drawing `X_T ~ N(θT, T)` in the unit
/// model. `mean_stop` is the horizon and `se_stop` is zero.
pub fn simulate_fixed(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let design = fixed_design(&config.spec);
    let horizon = design.horizon;
    let mean = config.hypothesis.drift() * horizon;
    let sd = horizon.sqrt();
    let truth = config.hypothesis;
    let seed = config.seed;
    let wrong = config.run_in_pool(|| {
        (0..config.paths)
            .into_par_iter()
            .map(|i| {
                let z: f64 = stream(seed, 2 * i).sample(StandardNormal);
                u64::from(design.decide(mean + sd * z) != truth)
            })
            .sum::<u64>()
    })?;
    Ok(SimResult {
        mean_stop: snr_scale_factor(&config.signal) * horizon,
        se_stop: 0.0,
        error_rate: wrong as f64 / config.paths as f64,
        n_wrong: wrong,
        n_capped: 0,
        paths: config.paths,
        sum_half_steps: 0,
        sum_sq_half_steps: 0,
    })
}

/// Both tests under both hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub spec: ErrorSpec,
    /// Fixed-sample horizon in signal time units.
    pub horizon: f64,
    /// SPRT results under `H₋₁` and `H₁`.
    pub sprt: [SimResult; 2],
    pub fixed: [SimResult; 2],
    /// Empirical relative efficiency: the pooled ratio in the symmetric
    /// case, otherwise the ratio under the hypothesis with the larger
    /// expected stopping time.
    pub f_hat: f64,
    /// Closed-form `f` or `F`.
    pub f_exact: f64,
}

impl ComparisonReport {
    pub fn deviation(&self) -> f64 {
        self.f_hat - self.f_exact
    }

    pub const CSV_HEADER: &'static str =
        "test,theta,mean_stop,se_stop,error_rate,n_wrong,n_capped,paths";

    pub fn csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (name, results) in [("sprt", &self.sprt), ("fixed", &self.fixed)] {
            for (theta, r) in [(-1, &results[0]), (1, &results[1])] {
                out.push_str(&format!("{name},{theta},{}\n", r.csv_row()));
            }
        }
        out
    }
}

/// Runs [`simulate_sprt`] and [`simulate_fixed`] under both hypotheses with
/// the settings of `template` (its hypothesis is ignored).
pub fn run_comparison(template: &SimConfig) -> Result<ComparisonReport> {
    let spec = template.spec;
    let neg = template.clone().hypothesis(Hypothesis::Negative);
    let pos = template.clone().hypothesis(Hypothesis::Positive);
    let sprt = [simulate_sprt(&neg)?, simulate_sprt(&pos)?];
    let fixed = [simulate_fixed(&neg)?, simulate_fixed(&pos)?];
    let horizon = fixed[0].mean_stop;
    let (f_hat, f_exact) = if spec.is_symmetric() {
        let pooled = 0.5 * (sprt[0].mean_stop + sprt[1].mean_stop);
        (pooled / horizon, relative_efficiency(spec.alpha())?)
    } else {
        // ω(α, β) under H₋₁ is the larger one when α ≥ β
        let slow = if spec.alpha() >= spec.beta() { 0 } else { 1 };
        (
            sprt[slow].mean_stop / horizon,
            relative_efficiency_asym(spec.alpha(), spec.beta())?,
        )
    };
    Ok(ComparisonReport {
        spec,
        horizon,
        sprt,
        fixed,
        f_hat,
        f_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(alpha: f64) -> ErrorSpec {
        ErrorSpec::symmetric(alpha).unwrap()
    }

    #[test]
    fn bridge_examples() {
        let p = bridge_cross_prob(0.9, 0.95, 1.0, 0.01).unwrap();
        assert!((p - (-1f64).exp()).abs() < 1e-15);
        let mirrored = bridge_cross_prob(-0.9, -0.95, -1.0, 0.01).unwrap();
        assert_eq!(p, mirrored);
        assert!(bridge_cross_prob(0.999, 0.999, 1.0, 1e-9).unwrap() < 1e-300);
        assert!(bridge_cross_prob(0.9, 1.0, 1.0, 0.01).is_err());
        assert!(bridge_cross_prob(0.9, 1.1, 1.0, 0.01).is_err());
        assert!(bridge_cross_prob(0.9, 0.95, 1.0, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let base = SimConfig::new(sym(0.05), Hypothesis::Positive);
        assert!(base.clone().step(0.0).validate().is_err());
        assert!(base.clone().paths(0).validate().is_err());
        assert!(base.clone().workers(0).validate().is_err());
        let mut low_cap = base.clone();
        low_cap.max_time = Some(1.0);
        assert!(matches!(low_cap.validate(), Err(Error::Config(_))));
        assert!(base.validate().is_ok());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let base = SimConfig::new(sym(0.1), Hypothesis::Negative)
            .step(1e-3)
            .paths(2000)
            .seed(7);
        let one = simulate_sprt(&base.clone().workers(1)).unwrap();
        let many = simulate_sprt(&base.clone().workers(8)).unwrap();
        assert_eq!(one, many);
        let f1 = simulate_fixed(&base.clone().workers(1)).unwrap();
        let f8 = simulate_fixed(&base.workers(8)).unwrap();
        assert_eq!(f1, f8);
    }

    #[test]
    fn fixed_reports_horizon_exactly() {
        let spec = ErrorSpec::new(0.02, 1e-6).unwrap();
        let r = simulate_fixed(&SimConfig::new(spec, Hypothesis::Positive).paths(10)).unwrap();
        assert_eq!(r.mean_stop, fixed_design(&spec).horizon);
        assert_eq!(r.se_stop, 0.0);
    }

    #[test]
    fn fixed_error_rate() {
        let cfg = SimConfig::new(sym(0.05), Hypothesis::Negative).paths(100_000);
        let r = simulate_fixed(&cfg).unwrap();
        assert!((r.error_rate - 0.05).abs() <= 0.003, "{}", r.error_rate);
    }

    #[test]
    fn capped_paths_fail_unless_allowed() {
        let cfg = SimConfig::new(sym(0.05), Hypothesis::Positive).paths(4);
        let tally = Tally::one(8, None, Hypothesis::Positive).merge(Tally::one(
            6,
            Some(Hypothesis::Positive),
            Hypothesis::Positive,
        ));
        let result = tally.finish(0.5);
        assert_eq!(result.n_capped, 1);
        assert!(matches!(
            check_capped(&cfg, result),
            Err(Error::Capped { capped: 1, .. })
        ));
        let allowed = SimConfig {
            allow_capped: true,
            ..cfg
        };
        assert_eq!(check_capped(&allowed, result).unwrap(), result);
    }

    #[test]
    fn tally_moments() {
        let t = [2u64, 4, 6]
            .iter()
            .map(|&k| Tally::one(k, Some(Hypothesis::Negative), Hypothesis::Positive))
            .fold(Tally::default(), Tally::merge);
        let r = t.finish(0.5);
        assert_eq!(r.mean_stop, 2.0);
        // sample sd of (1, 2, 3) is 1
        assert!((r.se_stop - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.error_rate, 1.0);
    }

    #[test]
    fn bridge_shortens_coarse_runs() {
        // same increments with and without the bridge test
        let base = SimConfig::new(sym(0.05), Hypothesis::Positive)
            .step(1e-2)
            .paths(4000)
            .seed(3);
        let on = simulate_sprt(&base.clone().bridge(true)).unwrap();
        let off = simulate_sprt(&base.bridge(false)).unwrap();
        assert!(off.mean_stop > on.mean_stop);
        assert!(off.error_rate <= on.error_rate);
    }
}
