//! Reproducible one-dimensional grids.
//!
//! An [`Axis`] is a list of segments. Every segment but the last covers
//! `[from, to)`; the last covers `[from, to]`. Endpoints are reproduced
//! exactly, so a grid ending at `0.5 - 1e-12` ends at that very double.

use std::fmt;

use crate::efficiency::ALPHA_MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Geometric spacing; both ends must be positive.
    Log,
    /// Points `½ − g` with the gap `g` geometric between `½ − from` and
    /// `½ − to`; refines toward `½`.
    HalfLog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub spacing: Spacing,
    pub from: f64,
    pub to: f64,
    pub n: usize,
}

impl Segment {
    pub fn new(spacing: Spacing, from: f64, to: f64, n: usize) -> Self {
        Segment {
            spacing,
            from,
            to,
            n,
        }
    }

    fn push_points(&self, closed: bool, out: &mut Vec<f64>) {
        let n = self.n;
        if n == 0 {
            return;
        }
        let denom = if closed {
            n.saturating_sub(1).max(1)
        } else {
            n
        } as f64;
        for i in 0..n {
            if i == 0 {
                out.push(self.from);
                continue;
            }
            if closed && i == n - 1 {
                out.push(self.to);
                continue;
            }
            let t = i as f64 / denom;
            let v = match self.spacing {
                Spacing::Linear => self.from + (self.to - self.from) * t,
                Spacing::Log => (self.from.ln() + (self.to / self.from).ln() * t).exp(),
                Spacing::HalfLog => {
                    let g0 = 0.5 - self.from;
                    let g1 = 0.5 - self.to;
                    0.5 - (g0.ln() + (g1 / g0).ln() * t).exp()
                }
            };
            out.push(v);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    segments: Vec<Segment>,
}

impl Axis {
    pub fn new(segments: Vec<Segment>) -> Self {
        Axis { segments }
    }

    pub fn linear(from: f64, to: f64, n: usize) -> Self {
        Axis::new(vec![Segment::new(Spacing::Linear, from, to, n)])
    }

    pub fn log(from: f64, to: f64, n: usize) -> Self {
        Axis::new(vec![Segment::new(Spacing::Log, from, to, n)])
    }

    /// `n` points over `[edge, ½ − edge]`: a quarter log-spaced up to 0.01,
    /// half linear over `[0.01, 0.49)`, a quarter refining toward `½`.
    pub fn open_half(n: usize, edge: f64) -> Self {
        let quarter = n / 4;
        let middle = n - 2 * quarter;
        Axis::new(vec![
            Segment::new(Spacing::Log, edge, 0.01, quarter),
            Segment::new(Spacing::Linear, 0.01, 0.49, middle),
            Segment::new(Spacing::HalfLog, 0.49, 0.5 - edge, quarter),
        ])
    }

    /// The 10⁴-point α grid over `[1e−12, ½ − 1e−12]`: log-spaced below
    /// 0.01, linear above.
    pub fn efficiency_scan() -> Self {
        Axis::new(vec![
            Segment::new(Spacing::Log, 1e-12, 0.01, 5000),
            Segment::new(Spacing::Linear, 0.01, ALPHA_MAX, 5000),
        ])
    }

    pub fn points(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let last = self.segments.len().saturating_sub(1);
        for (i, seg) in self.segments.iter().enumerate() {
            seg.push_points(i == last, &mut out);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(|s| s.n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            let kind = match s.spacing {
                Spacing::Linear => "lin",
                Spacing::Log => "log",
                Spacing::HalfLog => "halflog",
            };
            write!(f, "{kind}[{:e},{:e}]x{}", s.from, s.to, s.n)?;
        }
        Ok(())
    }
}
