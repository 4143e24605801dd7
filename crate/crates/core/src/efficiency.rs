//! Relative efficiency of the SPRT against the fixed-sample test.
//!
//! Symmetric case: `f(α) = E[τ_α]/T_α`, increasing from `¼` at `α → 0` to
//! `2/π` at `α → ½`. Asymmetric case: `F(α, β)` is the larger expected
//! stopping time over the fixed horizon `T_{α,β}`.

use std::f64::consts::{FRAC_2_PI, PI};

use rayon::prelude::*;

use crate::design::{mean_exit_time, symmetric_mean_exit_time};
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::special::quantile_unchecked;

/// `lim_{α→0} f(α)`.
pub const LIMIT_AT_ZERO: f64 = 0.25;
/// `lim_{α→½} f(α) = 2/π`.
pub const LIMIT_AT_HALF: f64 = FRAC_2_PI;

/// Largest error bound accepted by the efficiency functions. At `α = ½`
/// both the expected stopping time and the horizon vanish; the limit is
/// exposed as [`LIMIT_AT_HALF`] instead of being extrapolated.
pub const ALPHA_MAX: f64 = 0.5 - 1e-12;

pub(crate) fn check_alpha(name: &'static str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= ALPHA_MAX {
        Ok(())
    } else {
        Err(Error::domain(name, alpha, "(0, 1/2 - 1e-12]"))
    }
}

/// `f(α) = ((1−2α)/2)·ln((1−α)/α) / (Φ⁻¹(α))²`.
pub fn relative_efficiency(alpha: f64) -> Result<f64> {
    check_alpha("alpha", alpha)?;
    let q = quantile_unchecked(alpha);
    Ok(symmetric_mean_exit_time(alpha) / (q * q))
}

/// `F(α, β) = max{E₋₁τ, E₁τ} / T_{α,β}`.
///
/// The larger expected stopping time is always `ω(max{α,β}, min{α,β})`, so
/// no comparison is made. `F(α, α)` is bit-identical to `f(α)`.
pub fn relative_efficiency_asym(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha("alpha", alpha)?;
    check_alpha("beta", beta)?;
    let (hi, lo) = if alpha >= beta {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    let sum = quantile_unchecked(hi) + quantile_unchecked(lo);
    let horizon = sum * sum / 4.0;
    Ok(mean_exit_time(hi, lo) / horizon)
}

/// Average sample-size reduction `1 − value`.
pub fn reduction(value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(1.0 - value)
    } else {
        Err(Error::domain("value", value, "[0, 1]"))
    }
}

/// Leading small-α behaviour `¼ − ln(−ln α)/(8·ln α)`, defined for
/// `α < e^{−e}` so that the correction is positive and decreasing.
pub fn f_asymptotic(alpha: f64) -> Result<f64> {
    let cutoff = (-std::f64::consts::E).exp();
    if !(alpha > 0.0 && alpha < cutoff) {
        return Err(Error::domain("alpha", alpha, "(0, exp(-e))"));
    }
    let l = -alpha.ln();
    Ok(0.25 + l.ln() / (8.0 * l))
}

/// Two-term expansion `−2·ln α − ln(−4π·ln α)` of `(Φ⁻¹(α))²` as `α → 0`.
pub fn quantile_square_expansion(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain("alpha", alpha, "(0, 1/2)"));
    }
    let l = -alpha.ln();
    Ok(2.0 * l - (4.0 * PI * l).ln())
}

/// Bracket used by [`alpha_for_reduction`], in `ln α`.
const SOLVE_LOG_LO: f64 = -690.775_527_898_213_7; // ln 1e−300
const SOLVE_HI: f64 = 0.5 - 1e-6;
const SOLVE_STEPS: usize = 200;

/// The unique `α` with `1 − f(α) = target`, by bisection on `ln α`.
///
/// Targets must lie in `(1 − 2/π, ¾)`; targets in that range whose `α`
/// falls outside `[1e−300, ½ − 1e−6]` are reported as unreachable.
pub fn alpha_for_reduction(target: f64) -> Result<f64> {
    if !(target > 1.0 - LIMIT_AT_HALF && target < 1.0 - LIMIT_AT_ZERO) {
        return Err(Error::domain("reduction", target, "(1 - 2/pi, 3/4)"));
    }
    let reduction_at = |log_alpha: f64| -> f64 {
        let alpha = log_alpha.exp().min(SOLVE_HI);
        1.0 - relative_efficiency(alpha).expect("bracket stays in the domain")
    };
    let mut lo = SOLVE_LOG_LO;
    let mut hi = SOLVE_HI.ln();
    // reduction decreases in α
    if reduction_at(lo) < target {
        return Err(Error::Unreachable {
            name: "reduction",
            value: target,
            reason: "needs alpha below 1e-300",
        });
    }
    if reduction_at(hi) > target {
        return Err(Error::Unreachable {
            name: "reduction",
            value: target,
            reason: "needs alpha above 1/2 - 1e-6",
        });
    }
    for _ in 0..SOLVE_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reduction_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lo_gap = (reduction_at(lo) - target).abs();
    let hi_gap = (reduction_at(hi) - target).abs();
    Ok(if lo_gap <= hi_gap { lo } else { hi }.exp())
}

/// One `(α, β, value, reduction)` record of an efficiency curve or surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
    pub reduction: f64,
}

impl EfficiencyPoint {
    pub fn symmetric(alpha: f64) -> Result<Self> {
        let value = relative_efficiency(alpha)?;
        Ok(EfficiencyPoint {
            alpha,
            beta: alpha,
            value,
            reduction: 1.0 - value,
        })
    }

    pub fn asymmetric(alpha: f64, beta: f64) -> Result<Self> {
        let value = relative_efficiency_asym(alpha, beta)?;
        Ok(EfficiencyPoint {
            alpha,
            beta,
            value,
            reduction: 1.0 - value,
        })
    }
}

/// `f` along an axis, in axis order.
pub fn curve(axis: &Axis) -> Result<Vec<EfficiencyPoint>> {
    axis.points()
        .into_par_iter()
        .map(EfficiencyPoint::symmetric)
        .collect()
}

/// `F` on the product grid, rows by `alpha` then columns by `beta`.
pub fn surface(alphas: &Axis, betas: &Axis) -> Result<Vec<EfficiencyPoint>> {
    let betas = betas.points();
    alphas
        .points()
        .into_par_iter()
        .flat_map_iter(|a| {
            betas
                .iter()
                .map(move |&b| EfficiencyPoint::asymmetric(a, b))
        })
        .collect()
}
