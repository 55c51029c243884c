//! Convex transport costs `α: ℝ⁺ → ℝ⁺` with `α(0) = 0`.
//!
//! A [`CostFunction`] is an expression tree: analytic leaves (powers,
//! quadratic-then-linear, zero-then-power, piecewise-linear tables) combined
//! by argument scaling, truncation-shift and pointwise sums. Composite kinds
//! evaluate their components lazily, so `eval(scaled(α, a), t)` is exactly
//! `eval(α, a·t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::quad::bisect_boundary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    /// `t^p`, `p ≥ 1`.
    Power { p: f64 },
    /// `t²` on `[0, h]`, then `2ht − h²`.
    QuadraticLinear { h: f64 },
    /// `0` on `[0, h]`, then `(t − h)^p`.
    ZeroThenPower { h: f64, p: f64 },
    /// `max(base(t) − h², 0)`.
    ShiftedTruncation { base: Box<CostFunction>, h: f64 },
    /// `base(a·t)`.
    Scaled { base: Box<CostFunction>, a: f64 },
    Sum {
        left: Box<CostFunction>,
        right: Box<CostFunction>,
    },
    /// Convex piecewise-linear cost: slope `slopes[i]` on
    /// `[breakpoints[i], breakpoints[i+1])`, the last slope extending to ∞.
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
    },
}

impl CostFunction {
    pub fn power(p: f64) -> Self {
        CostFunction::Power { p }
    }

    pub fn quadratic() -> Self {
        CostFunction::Power { p: 2.0 }
    }

    /// Quadratic near zero, linear beyond `h`.
    pub fn alpha1(h: f64) -> Self {
        CostFunction::QuadraticLinear { h }
    }

    pub fn zero_then_power(h: f64, p: f64) -> Self {
        CostFunction::ZeroThenPower { h, p }
    }

    /// `[t − 1]₊²`.
    pub fn beta2() -> Self {
        CostFunction::ZeroThenPower { h: 1.0, p: 2.0 }
    }

    /// `t²/36` on `[0, 4]` and `2(t − 2)/9` beyond, the cost in Maurey's
    /// inf-convolution inequality for the two-sided exponential law.
    pub fn maurey() -> Self {
        CostFunction::scaled(CostFunction::alpha1(2.0 / 3.0), 1.0 / 6.0)
    }

    pub fn shifted_truncation(base: CostFunction, h: f64) -> Self {
        CostFunction::ShiftedTruncation {
            base: Box::new(base),
            h,
        }
    }

    pub fn scaled(base: CostFunction, a: f64) -> Self {
        CostFunction::Scaled {
            base: Box::new(base),
            a,
        }
    }

    pub fn sum(left: CostFunction, right: CostFunction) -> Self {
        CostFunction::Sum {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let c = CostFunction::PiecewiseLinear { breakpoints, slopes };
        c.validate()?;
        Ok(c)
    }

    /// Checks parameters and the sampled convexity/monotonicity invariants.
    pub fn validate(&self) -> Result<()> {
        self.validate_params()?;
        self.check_shape(1024, 1e-10)
    }

    fn validate_params(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Construction(m));
        match self {
            CostFunction::Power { p } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return bad(format!("power exponent {p} must be >= 1"));
                }
            }
            CostFunction::QuadraticLinear { h } => {
                if !(*h > 0.0 && h.is_finite()) {
                    return bad(format!("threshold h = {h} must be positive"));
                }
            }
            CostFunction::ZeroThenPower { h, p } => {
                if !(*h > 0.0 && h.is_finite()) {
                    return bad(format!("threshold h = {h} must be positive"));
                }
                if !(*p >= 1.0 && p.is_finite()) {
                    return bad(format!("power exponent {p} must be >= 1"));
                }
            }
            CostFunction::ShiftedTruncation { base, h } => {
                if !(*h >= 0.0 && h.is_finite()) {
                    return bad(format!("truncation level h = {h} must be non-negative"));
                }
                base.validate_params()?;
            }
            CostFunction::Scaled { base, a } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return bad(format!("scale a = {a} must be positive"));
                }
                base.validate_params()?;
            }
            CostFunction::Sum { left, right } => {
                left.validate_params()?;
                right.validate_params()?;
            }
            CostFunction::PiecewiseLinear { breakpoints, slopes } => {
                if breakpoints.is_empty() || breakpoints.len() != slopes.len() {
                    return bad("breakpoints and slopes must be non-empty and of equal length".into());
                }
                if breakpoints[0] != 0.0 {
                    return bad("first breakpoint must be 0".into());
                }
                if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
                    return bad("breakpoints must be strictly increasing".into());
                }
                if slopes.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
                    return bad("slopes must be finite and non-negative".into());
                }
                if !slopes.windows(2).all(|w| w[0] <= w[1]) {
                    return bad("slopes must be non-decreasing (convexity)".into());
                }
            }
        }
        Ok(())
    }

    /// Sampled check of `α(0) = 0`, monotonicity and midpoint convexity on
    /// `n` nodes over `[0, 4·scale]`, where `scale` is the largest threshold.
    pub fn check_shape(&self, n: usize, tol: f64) -> Result<()> {
        if self.eval_unchecked(0.0) != 0.0 {
            return Err(Error::Construction("cost must vanish at 0".into()));
        }
        let span = 4.0 * self.characteristic_scale().max(1.0);
        let ts = linspace(0.0, span, n);
        for w in ts.windows(2) {
            let (a, b) = (self.eval_unchecked(w[0]), self.eval_unchecked(w[1]));
            if b < a - tol * a.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "cost decreases between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        for w in ts.windows(3) {
            let mid = self.eval_unchecked(w[1]);
            let avg = 0.5 * (self.eval_unchecked(w[0]) + self.eval_unchecked(w[2]));
            if mid > avg + tol * avg.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "midpoint convexity fails at t = {}",
                    w[1]
                )));
            }
        }
        Ok(())
    }

    fn characteristic_scale(&self) -> f64 {
        match self {
            CostFunction::Power { .. } => 1.0,
            CostFunction::QuadraticLinear { h } | CostFunction::ZeroThenPower { h, .. } => *h,
            CostFunction::ShiftedTruncation { base, h } => base.characteristic_scale().max(*h),
            CostFunction::Scaled { base, a } => base.characteristic_scale() / a,
            CostFunction::Sum { left, right } => {
                left.characteristic_scale().max(right.characteristic_scale())
            }
            CostFunction::PiecewiseLinear { breakpoints, .. } => {
                *breakpoints.last().unwrap_or(&1.0)
            }
        }
    }

    /// `α(t)`; negative `t` is a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::Domain(format!("cost argument {t} must be non-negative")));
        }
        Ok(self.eval_unchecked(t))
    }

    /// `α(t)` for `t ≥ 0` without the argument check.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        match self {
            CostFunction::Power { p } => {
                if *p == 2.0 {
                    t * t
                } else if *p == 1.0 {
                    t
                } else {
                    t.powf(*p)
                }
            }
            CostFunction::QuadraticLinear { h } => {
                if t <= *h {
                    t * t
                } else {
                    2.0 * h * t - h * h
                }
            }
            CostFunction::ZeroThenPower { h, p } => {
                if t <= *h {
                    0.0
                } else if *p == 2.0 {
                    (t - h) * (t - h)
                } else {
                    (t - h).powf(*p)
                }
            }
            CostFunction::ShiftedTruncation { base, h } => (base.eval_unchecked(t) - h * h).max(0.0),
            CostFunction::Scaled { base, a } => base.eval_unchecked(a * t),
            CostFunction::Sum { left, right } => left.eval_unchecked(t) + right.eval_unchecked(t),
            CostFunction::PiecewiseLinear { breakpoints, slopes } => {
                let mut acc = 0.0;
                for i in 0..breakpoints.len() {
                    let start = breakpoints[i];
                    if t <= start {
                        break;
                    }
                    let end = breakpoints.get(i + 1).copied().unwrap_or(f64::INFINITY);
                    acc += slopes[i] * (t.min(end) - start);
                }
                acc
            }
        }
    }

    /// Whether the cost grows without bound.
    pub fn is_unbounded(&self) -> bool {
        match self {
            CostFunction::ShiftedTruncation { base, .. } | CostFunction::Scaled { base, .. } => {
                base.is_unbounded()
            }
            CostFunction::Sum { left, right } => left.is_unbounded() || right.is_unbounded(),
            CostFunction::PiecewiseLinear { slopes, .. } => *slopes.last().unwrap_or(&0.0) > 0.0,
            _ => true,
        }
    }

    /// Generalized inverse `inf{t ≥ 0 : α(t) ≥ y}`; `inverse(0) = 0`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y < 0.0 || y.is_nan() {
            return Err(Error::Domain(format!("inverse argument {y} must be non-negative")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y.is_infinite() {
            return Err(Error::Range("inverse of +inf".into()));
        }
        match self {
            CostFunction::Power { p } => Ok(y.powf(1.0 / p)),
            CostFunction::QuadraticLinear { h } => Ok(if y <= h * h {
                y.sqrt()
            } else {
                (y + h * h) / (2.0 * h)
            }),
            CostFunction::ZeroThenPower { h, p } => Ok(h + if *p == 2.0 { y.sqrt() } else { y.powf(1.0 / p) }),
            CostFunction::ShiftedTruncation { base, h } => base.inverse(y + h * h),
            CostFunction::Scaled { base, a } => Ok(base.inverse(y)? / a),
            _ => self.inverse_by_bisection(y),
        }
    }

    fn inverse_by_bisection(&self, y: f64) -> Result<f64> {
        let below = |t: f64| self.eval_unchecked(t) < y;
        let mut hi = 1.0;
        while below(hi) {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Range(format!("{y} exceeds the range of the cost")));
            }
        }
        let lo = bisect_boundary(below, 0.0, hi);
        // `lo` is the last point below y; its successor is the infimum.
        let next = f64::from_bits(lo.to_bits() + 1);
        Ok(if below(lo) { next.min(hi) } else { lo })
    }

    /// Largest `h ≥ 0` with `α = 0` on `[0, h]`.
    pub fn zero_threshold(&self) -> f64 {
        match self {
            CostFunction::Power { .. } | CostFunction::QuadraticLinear { .. } => 0.0,
            CostFunction::ZeroThenPower { h, .. } => *h,
            CostFunction::ShiftedTruncation { base, h } => {
                // sup{t : base(t) ≤ h²}
                let level = h * h;
                if level == 0.0 {
                    return base.zero_threshold();
                }
                let pred = |t: f64| base.eval_unchecked(t) <= level;
                let mut hi = 1.0;
                while pred(hi) {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return f64::INFINITY;
                    }
                }
                bisect_boundary(pred, 0.0, hi)
            }
            CostFunction::Scaled { base, a } => base.zero_threshold() / a,
            CostFunction::Sum { left, right } => left.zero_threshold().min(right.zero_threshold()),
            CostFunction::PiecewiseLinear { breakpoints, slopes } => slopes
                .iter()
                .position(|&s| s > 0.0)
                .map(|i| breakpoints[i])
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Central-difference slope `α'(t)`, one-sided at `t = 0`.
    pub fn slope(&self, t: f64) -> f64 {
        let step = 1e-6 * t.abs().max(1.0);
        if t <= step {
            (self.eval_unchecked(t + step) - self.eval_unchecked(t)) / step
        } else {
            (self.eval_unchecked(t + step) - self.eval_unchecked(t - step)) / (2.0 * step)
        }
    }
}

/// Outcome of the shrinking-constant bound for zero-then-convex costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkConstant {
    /// `c = b·h / (2·β⁻¹(k))`.
    pub c: f64,
    /// `min_v ([β(bv) − k]₊ − β(cv))` over the checked nodes.
    pub worst_margin: f64,
    pub worst_v: f64,
}

/// For `β` vanishing on `[0, h]` and increasing beyond, returns the `c` with
/// `[β(bv) − k]₊ ≥ β(cv)` for every `v ≥ 0`, and reports the smallest margin
/// of that inequality over `nodes`.
pub fn shrink_constant(beta: &CostFunction, b: f64, k: f64, nodes: &[f64]) -> Result<ShrinkConstant> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k = {k} must be positive")));
    }
    if !(b > 0.0) {
        return Err(Error::Domain(format!("b = {b} must be positive")));
    }
    let h = beta.zero_threshold();
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain("cost must vanish on a non-trivial interval [0, h]".into()));
    }
    let c = b * h / (2.0 * beta.inverse(k)?);
    let mut worst_margin = f64::INFINITY;
    let mut worst_v = 0.0;
    for &v in nodes.iter().filter(|v| **v >= 0.0) {
        let lhs = (beta.eval_unchecked(b * v) - k).max(0.0);
        let m = lhs - beta.eval_unchecked(c * v);
        if m < worst_margin {
            worst_margin = m;
            worst_v = v;
        }
    }
    Ok(ShrinkConstant { c, worst_margin, worst_v })
}
