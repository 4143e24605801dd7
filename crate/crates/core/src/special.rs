//! Standard normal density, distribution function, quantile and Mills ratio.
//!
//! Everything is evaluated in terms of the upper tail `1 − Φ(z)` for `z ≥ 0`,
//! so that probabilities down to the bottom of the normal double range keep
//! full relative accuracy. The tail is computed as `φ(z)·M(z)` where the Mills
//! ratio `M` comes from smooth rational approximations (the SunPro `erfc`
//! fits, re-expressed in the normal scale) or, far out, from Laplace's
//! continued fraction. The Gaussian factor `exp(−z²/2)` is split so that the
//! rounding of `z²` never enters the exponent.
//!
//! The quantile starts from Acklam's rational approximation (relative error
//! about 1e−9) and takes one Halley step against the tail-accurate Φ.

#![allow(clippy::excessive_precision, clippy::unreadable_literal)]

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// `1/√(2π)`
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934;
/// `√π`
const SQRT_PI: f64 = 1.772_453_850_905_516_027_298_167_483_341;

/// A probability strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Probability(value))
        } else {
            Err(Error::domain("p", value, "(0, 1)"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `Φ⁻¹(p)`; infallible because the domain was checked on construction.
    pub fn quantile(self) -> RealZ {
        RealZ(quantile_unchecked(self.0))
    }
}

/// A finite standard-normal abscissa.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealZ(f64);

impl RealZ {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(RealZ(value))
        } else {
            Err(Error::domain("z", value, "finite reals"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn pdf(self) -> f64 {
        normal_pdf(self.0)
    }

    pub fn cdf(self) -> f64 {
        normal_cdf(self.0)
    }

    pub fn mills(self) -> f64 {
        mills_ratio(self.0)
    }
}

/// Standard normal density `φ(z) = e^{−z²/2}/√(2π)`.
pub fn normal_pdf(z: f64) -> f64 {
    let a = z.abs();
    if a > 40.0 {
        return 0.0;
    }
    FRAC_1_SQRT_2PI * exp_neg_half_square(a)
}

/// `exp(−a²/2)` for `0 ≤ a ≤ 40`.
///
/// `a = hi + lo` with `hi` a multiple of 1/16, so `hi²` is exact and the
/// remaining factor has a small argument.
fn exp_neg_half_square(a: f64) -> f64 {
    let hi = (a * 16.0).trunc() / 16.0;
    let lo = a - hi;
    (-0.5 * hi * hi).exp() * (-0.5 * lo * (a + hi)).exp()
}

/// Standard normal distribution function `Φ(z)`.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return upper_tail(-z);
    }
    if z * FRAC_1_SQRT_2 < ERF_SMALL {
        0.5 + cdf_minus_half(z)
    } else {
        1.0 - upper_tail(z)
    }
}

/// Upper tail `1 − Φ(z)`, accurate in relative terms for large `z`.
pub fn normal_sf(z: f64) -> f64 {
    normal_cdf(-z)
}

/// Mills ratio `M(z) = (1 − Φ(z))/φ(z)`.
///
/// For `z ≥ 0` it never forms the quotient of two tiny numbers; for very
/// negative `z` it overflows to `+∞` like the exact value.
pub fn mills_ratio(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z >= 0.0 {
        return upper_mills(z);
    }
    let pdf = normal_pdf(z);
    if pdf == 0.0 {
        return f64::INFINITY;
    }
    normal_cdf(-z) / pdf
}

/// `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    Probability::new(p).map(|p| quantile_unchecked(p.value()))
}

pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    if p == 0.5 {
        0.0
    } else if p > 0.5 {
        // 1 − p is exact for p ≥ ½
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

/// `Φ(z) − ½`, accurate in relative terms near `z = 0`.
pub(crate) fn cdf_minus_half(z: f64) -> f64 {
    let x = z.abs() * FRAC_1_SQRT_2;
    let half_erf = if x < ERF_SMALL {
        0.5 * small_erf(x)
    } else {
        0.5 - upper_tail(z.abs())
    };
    half_erf.copysign(z)
}

// ---------------------------------------------------------------------------
// Upper tail
// ---------------------------------------------------------------------------

/// Breakpoints in the `erf` scale `x = z/√2`.
const ERF_SMALL: f64 = 0.84375;
const ERF_MID: f64 = 1.25;
const ERF_SPLIT: f64 = 1.0 / 0.35;
const ERF_FAR: f64 = 28.0;

/// `1 − Φ(z)` for `z ≥ 0`.
fn upper_tail(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    let x = z * FRAC_1_SQRT_2;
    if x < ERF_SMALL {
        // erfc = 1 − erf, no cancellation since erf ≤ 0.77 here
        if x < 0.25 {
            0.5 - 0.5 * small_erf(x)
        } else {
            0.5 * (0.5 - (x * small_erf_ratio(x) + (x - 0.5)))
        }
    } else if x < ERF_MID {
        0.5 * ((1.0 - ERX) - mid_erf_offset(x))
    } else if z > 40.0 {
        0.0
    } else {
        normal_pdf(z) * upper_mills(z)
    }
}

/// Mills ratio for `z ≥ 0`.
fn upper_mills(z: f64) -> f64 {
    let x = z * FRAC_1_SQRT_2;
    if x < ERF_MID {
        return upper_tail(z) / normal_pdf(z);
    }
    if x < ERF_FAR {
        // erfc(x) = exp(−x² − 0.5625 + R/S)/x, hence
        // M(z) = √(π/2)·e^{x²}·erfc(x) = √π·exp(−0.5625 + R/S)/z
        let s = 2.0 / (z * z);
        let rs = if x < ERF_SPLIT {
            tail_ratio_near(s)
        } else {
            tail_ratio_far(s)
        };
        return SQRT_PI * (rs - 0.5625).exp() / z;
    }
    if z.is_infinite() {
        return 0.0;
    }
    mills_continued_fraction(z)
}

/// Laplace's continued fraction `M(z) = 1/(z + 1/(z + 2/(z + 3/(z + …))))`,
/// evaluated with the modified Lentz method. Converges in a handful of
/// terms for `z ≥ 30`.
pub(crate) fn mills_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..10_000 {
        let a = n as f64;
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    1.0 / f
}

// SunPro erf/erfc rational fits (FreeBSD msun s_erf.c):
//
//   Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//   Developed at SunPro, a Sun Microsystems, Inc. business.
//   Permission to use, copy, modify, and distribute this software is
//   freely granted, provided that this notice is preserved.

const ERX: f64 = 8.45062911510467529297e-01;

const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

/// `(erf(x) − x)/x` for `|x| < 0.84375`.
fn small_erf_ratio(x: f64) -> f64 {
    let z = x * x;
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

fn small_erf(x: f64) -> f64 {
    x + x * small_erf_ratio(x)
}

/// `erf(x) − ERX` for `0.84375 ≤ x < 1.25`.
fn mid_erf_offset(x: f64) -> f64 {
    let s = x - 1.0;
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// `ln(x·e^{x²}·erfc(x)) + 0.5625` in terms of `s = 1/x²`, `1.25 ≤ x < 1/0.35`.
fn tail_ratio_near(s: f64) -> f64 {
    let r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
    let q = 1.0
        + s * (SA1
            + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
    r / q
}

/// Same quantity for `1/0.35 ≤ x < 28`.
fn tail_ratio_far(s: f64) -> f64 {
    let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
    let q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
    r / q
}

// ---------------------------------------------------------------------------
// Quantile
// ---------------------------------------------------------------------------

const ACKLAM_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ACKLAM_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const ACKLAM_P_LOW: f64 = 0.02425;

/// Acklam's initial guess for `0 < p < ½`.
fn acklam_lower(p: f64) -> f64 {
    let (a, b, c, d) = (ACKLAM_A, ACKLAM_B, ACKLAM_C, ACKLAM_D);
    if p < ACKLAM_P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    }
}

/// `Φ⁻¹(p)` for `0 < p < ½`.
fn lower_quantile(p: f64) -> f64 {
    let x = acklam_lower(p);
    let pdf = normal_pdf(x);
    if pdf == 0.0 {
        return x;
    }
    // Φ(x) − p, formulated so the difference keeps relative accuracy:
    // around the median both terms are measured from ½ (p − ½ is exact
    // for p ≥ ¼), in the tail Φ(x) is the tail itself.
    let residual = if p >= 0.25 {
        cdf_minus_half(x) - (p - 0.5)
    } else {
        upper_tail(-x) - p
    };
    let u = residual / pdf;
    x - u / (1.0 + 0.5 * x * u)
}
