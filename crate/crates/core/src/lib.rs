//! Fixed-sample and Wald sequential (SPRT) tests for the sign of the drift
//! of a Brownian motion `X_t = θt + W_t`, `θ ∈ {−1, +1}`.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: standard normal density, distribution, quantile and Mills
//!   ratio, accurate in the far tail.
//! - [`design`]: error bounds, fixed-horizon and SPRT designs and their
//!   (expected) sample sizes.
//! - [`efficiency`]: the relative efficiency of the SPRT against the fixed
//!   design, its limits and small-α expansion.
//! - [`inequality`]: signed-margin verifiers for the inequalities behind the
//!   efficiency bounds, with grid scans.
//! - [`simulator`]: a Monte Carlo engine that checks the closed forms.
//! - [`grid`]: reproducible one-dimensional grids shared by the scans.

pub mod design;
pub mod efficiency;
mod error;
pub mod grid;
pub mod inequality;
pub mod simulator;
pub mod special;

pub use design::{ErrorSpec, FixedDesign, Hypothesis, SequentialDesign, SignalSpec};
pub use efficiency::EfficiencyPoint;
pub use error::{Error, Result};
pub use grid::{Axis, Segment, Spacing};
pub use inequality::{MarginReport, Verifier};
pub use simulator::{ComparisonReport, SimConfig, SimResult};
pub use special::{Probability, RealZ};
