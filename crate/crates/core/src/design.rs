//! Test designs for `H₋₁: θ = −1` against `H₁: θ = +1` when observing
//! `X_t = θt + W_t`.
//!
//! `alpha` bounds `P₋₁(accept H₁)` and `beta` bounds `P₁(accept H₋₁)`.

use crate::error::{Error, Result};
use crate::special::quantile_unchecked;

/// Admissible error probabilities `(α, β) ∈ (0, ½)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSpec {
    alpha: f64,
    beta: f64,
}

impl ErrorSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_error_bound("alpha", alpha)?;
        check_error_bound("beta", beta)?;
        Ok(ErrorSpec { alpha, beta })
    }

    /// Equal bounds on both error types.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha == self.beta
    }
}

fn check_error_bound(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(name, value, "(0, 1/2)"))
    }
}

/// Drift magnitude and volatility of `X_t = θμt + σW_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    mu: f64,
    sigma: f64,
}

impl SignalSpec {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::domain("mu", mu, "(0, inf)"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("sigma", sigma, "(0, inf)"));
        }
        Ok(SignalSpec { mu, sigma })
    }

    /// The normalised model `μ = σ = 1`.
    pub fn unit() -> Self {
        SignalSpec {
            mu: 1.0,
            sigma: 1.0,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Signal-to-noise ratio `ρ = 2μ/σ`.
    pub fn rho(&self) -> f64 {
        2.0 * self.mu / self.sigma
    }
}

impl Default for SignalSpec {
    fn default() -> Self {
        Self::unit()
    }
}

/// Factor `4/ρ²` converting unit-model times (horizons, expected stopping
/// times) into times for the `(μ, σ)` model.
pub fn snr_scale_factor(signal: &SignalSpec) -> f64 {
    let rho = signal.rho();
    4.0 / (rho * rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `H₋₁: θ = −1`
    Negative,
    /// `H₁: θ = +1`
    Positive,
}

impl Hypothesis {
    pub fn from_theta(theta: i32) -> Result<Self> {
        match theta {
            -1 => Ok(Hypothesis::Negative),
            1 => Ok(Hypothesis::Positive),
            other => Err(Error::domain("theta", other as f64, "{-1, +1}")),
        }
    }

    pub fn theta(self) -> i32 {
        match self {
            Hypothesis::Negative => -1,
            Hypothesis::Positive => 1,
        }
    }

    pub fn drift(self) -> f64 {
        self.theta() as f64
    }

    pub fn other(self) -> Self {
        match self {
            Hypothesis::Negative => Hypothesis::Positive,
            Hypothesis::Positive => Hypothesis::Negative,
        }
    }
}

/// Observe `X` on `[0, horizon]` and accept `H₁` iff `X_horizon ≥ threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedDesign {
    pub horizon: f64,
    pub threshold: f64,
}

impl FixedDesign {
    pub fn decide(&self, terminal: f64) -> Hypothesis {
        if terminal >= self.threshold {
            Hypothesis::Positive
        } else {
            Hypothesis::Negative
        }
    }
}

/// Shortest horizon meeting both error bounds:
/// `T = (Φ⁻¹(α) + Φ⁻¹(β))²/4`, threshold `T + √T·Φ⁻¹(β)`.
///
/// In the symmetric case `T = (Φ⁻¹(α))²` and the threshold is exactly 0.
pub fn fixed_design(spec: &ErrorSpec) -> FixedDesign {
    let qa = quantile_unchecked(spec.alpha);
    let qb = quantile_unchecked(spec.beta);
    let sum = qa + qb;
    let horizon = sum * sum / 4.0;
    let threshold = if spec.is_symmetric() {
        0.0
    } else {
        horizon + horizon.sqrt() * qb
    };
    FixedDesign { horizon, threshold }
}

/// SPRT continuation interval `(lower, upper)`: stop at the first exit,
/// accept `H₁` at `upper` and `H₋₁` at `lower`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialDesign {
    pub lower: f64,
    pub upper: f64,
}

impl SequentialDesign {
    /// Decision once the path has left the interval, `None` while inside.
    pub fn classify(&self, x: f64) -> Option<Hypothesis> {
        if x >= self.upper {
            Some(Hypothesis::Positive)
        } else if x <= self.lower {
            Some(Hypothesis::Negative)
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }
}

/// Wald boundaries `lower = ½·ln(β/(1−α))`, `upper = ½·ln((1−β)/α)`.
pub fn sprt_design(spec: &ErrorSpec) -> SequentialDesign {
    let (a, b) = (spec.alpha, spec.beta);
    // (1−β)/α = 1 + (1−α−β)/α and (1−α)/β = 1 + (1−α−β)/β
    let slack = slack(a, b);
    SequentialDesign {
        lower: -0.5 * (slack / b).ln_1p(),
        upper: 0.5 * (slack / a).ln_1p(),
    }
}

/// Expected SPRT stopping time in the symmetric problem,
/// `((1−2α)/2)·ln((1−α)/α)`.
pub fn symmetric_mean_exit_time(alpha: f64) -> f64 {
    let gap = 1.0 - 2.0 * alpha;
    0.5 * (gap * (gap / alpha).ln_1p())
}

/// Expected SPRT stopping time under `H₋₁` for bounds `(alpha, beta)`,
/// `½(α·ln(α/(1−β)) + (1−α)·ln((1−α)/β))`. Under `H₁` swap the arguments.
///
/// Evaluated as `½((1−2α)·ln((1−α)/β) + α·ln(α(1−α)/(β(1−β))))`: both terms
/// are nonnegative when `α ≥ β`, and at `α = β` the result is bit-identical
/// to [`symmetric_mean_exit_time`]. With `u = 1−α−β` the logarithms are
/// `ln(1 + u/β)` and `ln(1 + (α−β)u/(β(1−β)))`, which stay accurate as
/// both bounds approach ½.
pub fn mean_exit_time(alpha: f64, beta: f64) -> f64 {
    let gap = 1.0 - 2.0 * alpha;
    let u = slack(alpha, beta);
    let log_upper = (u / beta).ln_1p();
    let log_ratio = ((alpha - beta) * u / (beta * (1.0 - beta))).ln_1p();
    0.5 * (gap * log_upper + alpha * log_ratio)
}

/// `1 − α − β` with relative accuracy even when both are close to ½.
fn slack(alpha: f64, beta: f64) -> f64 {
    (0.5 - alpha) + (0.5 - beta)
}

/// `E_θ[τ]` of the SPRT for `spec` in the unit model.
pub fn expected_stop_time(spec: &ErrorSpec, hypothesis: Hypothesis) -> f64 {
    match hypothesis {
        Hypothesis::Negative => mean_exit_time(spec.alpha, spec.beta),
        Hypothesis::Positive => mean_exit_time(spec.beta, spec.alpha),
    }
}
