//! Signed-margin verifiers for the inequalities behind the efficiency
//! bounds.
//!
//! Every verifier returns `LHS − RHS` oriented so that the inequality holds
//! exactly when the margin is nonnegative (or positive, or zero). A
//! [`scan`] evaluates one verifier on a whole grid and reports the worst
//! point.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;

use rayon::prelude::*;

use crate::design::mean_exit_time;
use crate::efficiency::{
    check_alpha, relative_efficiency, relative_efficiency_asym, LIMIT_AT_ZERO,
};
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::special::{
    cdf_minus_half, mills_ratio, normal_cdf, normal_pdf, normal_sf, quantile_unchecked,
};

/// A margin together with the magnitude of the terms it was formed from,
/// used for relative tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub scale: f64,
}

fn check_z(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("z", z, "[0, inf)"))
    }
}

fn check_open_half(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(name, x, "(0, 1/2)"))
    }
}

/// `z(2+z²)Φ(z)M(z) − (1+z²)(2Φ(z)−1)`: the Mills-ratio inequality with
/// both sides divided by `φ(z)`, so it stays meaningful far in the tail.
pub fn mills_lemma_scaled(z: f64) -> Result<Margin> {
    check_z(z)?;
    let z2 = z * z;
    let lhs = z * (2.0 + z2) * normal_cdf(z) * mills_ratio(z);
    let rhs = (1.0 + z2) * 2.0 * cdf_minus_half(z);
    Ok(Margin {
        value: lhs - rhs,
        scale: lhs.max(rhs),
    })
}

/// `z(2+z²)Φ(z)(1−Φ(z)) − (1+z²)(2Φ(z)−1)φ(z)`.
pub fn mills_lemma_margin(z: f64) -> Result<f64> {
    Ok(mills_lemma_scaled(z)?.value * normal_pdf(z))
}

fn two_dim_lemma(alpha: f64, beta: f64) -> Result<Margin> {
    check_open_half("alpha", alpha)?;
    check_open_half("beta", beta)?;
    if beta > alpha {
        return Err(Error::domain("beta", beta, "(0, alpha]"));
    }
    let qa = quantile_unchecked(alpha);
    let qb = quantile_unchecked(beta);
    let pdf = normal_pdf(qa);
    let odds = alpha * (1.0 - alpha);
    let first = qb * qb * pdf * pdf * pdf * (2.0 * alpha - 1.0) / (odds * odds);
    // ln(β/(1−β)) = −ln(1 + (1−2β)/β)
    let gap = 1.0 - 2.0 * beta;
    let second = -2.0 * gap * (gap / beta).ln_1p() * qa;
    Ok(Margin {
        value: first + second,
        scale: first.abs().max(second.abs()),
    })
}

/// `(Φ⁻¹β)²·φ³(Φ⁻¹α)·(2α−1)/(α²(1−α)²) + 2(1−2β)·ln(β/(1−β))·Φ⁻¹α`
/// for `0 < β ≤ α < ½`.
pub fn two_dim_lemma_margin(alpha: f64, beta: f64) -> Result<f64> {
    two_dim_lemma(alpha, beta).map(|m| m.value)
}

/// Switch between the two cancellation-free forms of the disc margin.
const DISC_SWITCH: f64 = 1.0;

/// `(1 − e^{−2z²/π}) − (2Φ(z)−1)²`.
///
/// Near zero both sides are `≈ 2z²/π` and are formed with `expm1` and
/// `Φ − ½`; beyond [`DISC_SWITCH`] it is written as
/// `4Q(1−Q) − e^{−2z²/π}` with `Q = 1 − Φ(z)`, so both sides never round
/// to one.
pub fn disc_estimate_margin(z: f64) -> Result<f64> {
    disc_estimate(z).map(|m| m.value)
}

fn disc_estimate(z: f64) -> Result<Margin> {
    check_z(z)?;
    let e = 2.0 * z * z / PI;
    if z <= DISC_SWITCH {
        let lhs = -(-e).exp_m1();
        let c = 2.0 * cdf_minus_half(z);
        let rhs = c * c;
        Ok(Margin {
            value: lhs - rhs,
            scale: lhs,
        })
    } else {
        let q = normal_sf(z);
        let tail = 4.0 * q * (1.0 - q);
        let disc = (-e).exp();
        Ok(Margin {
            value: tail - disc,
            scale: tail,
        })
    }
}

fn omega_max(alpha: f64, beta: f64) -> Result<Margin> {
    check_open_half("alpha", alpha)?;
    check_open_half("beta", beta)?;
    let closed = mean_exit_time(alpha.max(beta), alpha.min(beta));
    let compared = mean_exit_time(alpha, beta).max(mean_exit_time(beta, alpha));
    Ok(Margin {
        value: closed - compared,
        scale: compared,
    })
}

/// `ω(max{α,β}, min{α,β}) − max{ω(α,β), ω(β,α)}`; zero when the larger
/// expected stopping time is the one with the larger bound first.
pub fn omega_max_margin(alpha: f64, beta: f64) -> Result<f64> {
    omega_max(alpha, beta).map(|m| m.value)
}

// f(½ − ε) = 2/π + C2·ε² + C4·ε⁴ + O(ε⁶)
const HALF_C2: f64 = -0.484_506_970_176_558_2;
const HALF_C4: f64 = -0.578_352_547_158_795_7;
/// Below this distance from ½ the upper bound margin uses the expansion;
/// `2/π − f` is then far below the rounding error of `f`.
const HALF_SERIES: f64 = 1e-3;

/// `min{f(α) − ¼, 2/π − f(α)}`.
pub fn bounds_margin(alpha: f64) -> Result<f64> {
    let f = relative_efficiency(alpha)?;
    let eps = 0.5 - alpha;
    let upper = if eps < HALF_SERIES {
        let e2 = eps * eps;
        -(HALF_C2 + HALF_C4 * e2) * e2
    } else {
        FRAC_2_PI - f
    };
    Ok((f - LIMIT_AT_ZERO).min(upper))
}

/// `f(next) − f(alpha)` for `alpha < next`.
pub fn monotone_margin(alpha: f64, next: f64) -> Result<f64> {
    if alpha < next {
        Ok(relative_efficiency(next)? - relative_efficiency(alpha)?)
    } else {
        Err(Error::domain("next", next, "(alpha, 1/2)"))
    }
}

/// `F(α, β) − f(min{α, β})`.
pub fn dominance_margin(alpha: f64, beta: f64) -> Result<f64> {
    Ok(relative_efficiency_asym(alpha, beta)? - relative_efficiency(alpha.min(beta))?)
}

/// `(F(α, β) − f(β))·T_{α,β} = ω(α, β) − f(β)·T_{α,β}` for `α ≥ β`.
fn dominance_slice(alpha: f64, beta: f64) -> Result<Margin> {
    check_alpha("alpha", alpha)?;
    if alpha < beta {
        return Err(Error::domain("alpha", alpha, "[beta, 1/2)"));
    }
    let f = relative_efficiency(beta)?;
    let sum = quantile_unchecked(alpha) + quantile_unchecked(beta);
    let horizon = sum * sum / 4.0;
    let omega = mean_exit_time(alpha, beta);
    Ok(Margin {
        value: omega - f * horizon,
        scale: omega,
    })
}

/// What a verifier demands of its margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `margin ≥ −(abs + rel·scale)`.
    NonNegative { abs: f64, rel: f64 },
    /// `margin > 0`.
    Positive,
    /// `|margin| ≤ rel·scale`.
    Zero { rel: f64 },
}

impl Criterion {
    pub fn violated(&self, m: Margin) -> bool {
        match *self {
            Criterion::NonNegative { abs, rel } => {
                m.value.is_nan() || m.value < -(abs + rel * m.scale)
            }
            Criterion::Positive => m.value.is_nan() || m.value <= 0.0,
            Criterion::Zero { rel } => m.value.is_nan() || m.value.abs() > rel * m.scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verifier {
    /// Mills-ratio inequality divided by `φ(z)`.
    Mills,
    TwoDim,
    Disc,
    OmegaMax,
    /// Consecutive points of a line grid.
    Monotone,
    Bounds,
    /// `F(α, β) ≥ f(min{α, β})`.
    Dominance,
    /// The same inequality multiplied by `T_{α,β}` along `α ∈ [β, ½)`.
    DominanceSlice {
        beta: f64,
    },
}

impl Verifier {
    pub fn name(&self) -> &'static str {
        match self {
            Verifier::Mills => "mills",
            Verifier::TwoDim => "twodim",
            Verifier::Disc => "disc",
            Verifier::OmegaMax => "omega-max",
            Verifier::Monotone => "monotone",
            Verifier::Bounds => "bounds",
            Verifier::Dominance => "dominance",
            Verifier::DominanceSlice { .. } => "dominance-slice",
        }
    }

    pub fn criterion(&self) -> Criterion {
        match self {
            Verifier::Mills => Criterion::NonNegative {
                abs: 1e-13,
                rel: 0.0,
            },
            Verifier::Disc => Criterion::NonNegative {
                abs: 1e-14,
                rel: 0.0,
            },
            Verifier::TwoDim | Verifier::DominanceSlice { .. } => Criterion::NonNegative {
                abs: 0.0,
                rel: 1e-12,
            },
            Verifier::Dominance => Criterion::NonNegative {
                abs: 1e-12,
                rel: 0.0,
            },
            Verifier::OmegaMax => Criterion::Zero { rel: 1e-14 },
            Verifier::Monotone | Verifier::Bounds => Criterion::Positive,
        }
    }

    fn is_planar(&self) -> bool {
        matches!(
            self,
            Verifier::TwoDim | Verifier::OmegaMax | Verifier::Dominance
        )
    }

    /// The grid used by the command-line suites.
    pub fn default_grid(&self) -> Grid {
        match *self {
            Verifier::Mills => Grid::Line(Axis::linear(0.0, 40.0, 4000)),
            Verifier::Disc => Grid::Line(Axis::linear(0.0, 8.0, 2000)),
            Verifier::TwoDim => Grid::LowerTriangle(Axis::open_half(150, 1e-6)),
            Verifier::OmegaMax | Verifier::Dominance => {
                let axis = Axis::open_half(200, 1e-12);
                Grid::Product(axis.clone(), axis)
            }
            Verifier::Monotone | Verifier::Bounds => Grid::Line(Axis::efficiency_scan()),
            Verifier::DominanceSlice { beta } => Grid::Line(slice_axis(beta)),
        }
    }

    /// Margin at one point; `Monotone` takes consecutive pairs.
    pub fn evaluate(&self, point: Point) -> Result<Margin> {
        let plain = |value: f64| Margin { value, scale: 0.0 };
        match (*self, point) {
            (Verifier::Mills, Point::One(z)) => mills_lemma_scaled(z),
            (Verifier::Disc, Point::One(z)) => disc_estimate(z),
            (Verifier::Bounds, Point::One(a)) => bounds_margin(a).map(plain),
            (Verifier::DominanceSlice { beta }, Point::One(a)) => dominance_slice(a, beta),
            (Verifier::Monotone, Point::Two(a, b)) => monotone_margin(a, b).map(plain),
            (Verifier::TwoDim, Point::Two(a, b)) => two_dim_lemma(a, b),
            (Verifier::OmegaMax, Point::Two(a, b)) => omega_max(a, b),
            (Verifier::Dominance, Point::Two(a, b)) => dominance_margin(a, b).map(plain),
            _ => Err(Error::GridShape {
                verifier: self.name(),
                grid: point.shape(),
            }),
        }
    }
}

/// `α` from `β` to `½ − 1e−12`, refining toward `½`.
fn slice_axis(beta: f64) -> Axis {
    use crate::grid::{Segment, Spacing};
    Axis::new(vec![
        Segment::new(Spacing::Linear, beta, 0.49, 150),
        Segment::new(Spacing::HalfLog, 0.49, 0.5 - 1e-12, 50),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    One(f64),
    Two(f64, f64),
}

impl Point {
    fn shape(&self) -> &'static str {
        match self {
            Point::One(_) => "point",
            Point::Two(..) => "pair",
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::One(x) => write!(f, "{x:e}"),
            Point::Two(x, y) => write!(f, "({x:e}, {y:e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Line(Axis),
    Product(Axis, Axis),
    /// Pairs `(α, β)` with `β ≤ α`, both from the axis.
    LowerTriangle(Axis),
}

impl Grid {
    fn shape(&self) -> &'static str {
        match self {
            Grid::Line(_) => "line",
            Grid::Product(..) => "product",
            Grid::LowerTriangle(_) => "triangle",
        }
    }

    fn points(&self) -> Vec<Point> {
        match self {
            Grid::Line(axis) => axis.points().into_iter().map(Point::One).collect(),
            Grid::Product(xs, ys) => {
                let ys = ys.points();
                xs.points()
                    .into_iter()
                    .flat_map(|x| ys.iter().map(move |&y| Point::Two(x, y)))
                    .collect()
            }
            Grid::LowerTriangle(axis) => {
                let pts = axis.points();
                let mut out = Vec::with_capacity(pts.len() * (pts.len() + 1) / 2);
                for (i, &a) in pts.iter().enumerate() {
                    out.extend(pts[..=i].iter().map(|&b| Point::Two(a, b)));
                }
                out
            }
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Line(a) => write!(f, "{a}"),
            Grid::Product(a, b) => write!(f, "{a} x {b}"),
            Grid::LowerTriangle(a) => write!(f, "triangle {a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub verifier: Verifier,
    pub grid_description: String,
    pub points: usize,
    pub min_margin: f64,
    pub argmin: Point,
    /// Points failing the verifier's [`Criterion`].
    pub violations: usize,
    /// Every evaluated point in grid order.
    pub margins: Vec<(Point, f64)>,
}

impl MarginReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} points on {}, min margin {:.6e} at {}, {} violations",
            self.verifier.name(),
            self.points,
            self.grid_description,
            self.min_margin,
            self.argmin,
            self.violations
        )
    }

    /// `point,margin` rows; pairs are written as two columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let planar = matches!(self.argmin, Point::Two(..));
        out.push_str(if planar { "x,y,margin\n" } else { "x,margin\n" });
        for (p, m) in &self.margins {
            match p {
                Point::One(x) => out.push_str(&format!("{x:e},{m:e}\n")),
                Point::Two(x, y) => out.push_str(&format!("{x:e},{y:e},{m:e}\n")),
            }
        }
        out
    }
}

/// Evaluates `verifier` on every point of `grid`.
///
/// Margins are collected by index, so the report does not depend on
/// evaluation order or thread count. The first point outside the
/// verifier's domain aborts the scan.
pub fn scan(verifier: Verifier, grid: &Grid) -> Result<MarginReport> {
    let shape_ok = match grid {
        Grid::Line(_) => !verifier.is_planar(),
        _ => verifier.is_planar(),
    };
    if !shape_ok {
        return Err(Error::GridShape {
            verifier: verifier.name(),
            grid: grid.shape(),
        });
    }
    let mut points = grid.points();
    if verifier == Verifier::Monotone {
        points = points
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (Point::One(a), Point::One(b)) => Point::Two(a, b),
                _ => unreachable!("line grids hold single points"),
            })
            .collect();
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let criterion = verifier.criterion();
    let evaluated: Vec<(Point, Margin)> = points
        .into_par_iter()
        .map(|p| {
            verifier
                .evaluate(p)
                .map(|m| (p, m))
                .map_err(|e| Error::ScanPoint {
                    verifier: verifier.name(),
                    point: p.to_string(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let violations = evaluated
        .iter()
        .filter(|(_, m)| criterion.violated(*m))
        .count();
    let (argmin, min_margin) = evaluated.iter().map(|&(p, m)| (p, m.value)).fold(
        (evaluated[0].0, f64::INFINITY),
        |best, cur| {
            if cur.1 < best.1 {
                cur
            } else {
                best
            }
        },
    );
    Ok(MarginReport {
        verifier,
        grid_description: grid.to_string(),
        points: evaluated.len(),
        min_margin,
        argmin,
        violations,
        margins: evaluated.into_iter().map(|(p, m)| (p, m.value)).collect(),
    })
}
