//! Quadrature primitives.
//!
//! Everything here is built on a 15-point Gauss–Kronrod panel with its
//! embedded 7-point Gauss rule as the error estimate. Integrals that run
//! into an endpoint singularity or an unbounded tail are split into dyadic
//! panels `[top·2^{-j-1}, top·2^{-j}]`; the per-level contributions are kept
//! so divergence can be judged from the refinement trace.

use serde::{Deserialize, Serialize};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of a single panel or a sum of panels.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::AddAssign for Estimate {
    fn add_assign(&mut self, rhs: Self) {
        self.value += rhs.value;
        self.error += rhs.error;
    }
}

/// The 15 Kronrod nodes on `[a, b]` with their Kronrod weights (already
/// scaled by the half-length).
pub fn kronrod_nodes(a: f64, b: f64) -> [(f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 15];
    for i in 0..7 {
        out[2 * i] = (c - h * XGK[i], h * WGK[i]);
        out[2 * i + 1] = (c + h * XGK[i], h * WGK[i]);
    }
    out[14] = (c, h * WGK[7]);
    out
}

/// One Gauss–Kronrod 7/15 panel.
pub fn gk15<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Estimate {
    if a == b {
        return Estimate::default();
    }
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let fl = f(c - h * XGK[i]);
        let fr = f(c + h * XGK[i]);
        k += WGK[i] * (fl + fr);
        if i % 2 == 1 {
            g += WG[i / 2] * (fl + fr);
        }
    }
    Estimate {
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// GK15 over `[a, b]`, split at every breakpoint strictly inside. The
/// breakpoints need not be sorted.
pub fn gk15_split<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64]) -> Estimate {
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|p, q| p.partial_cmp(q).unwrap());
    inner.dedup();
    let mut total = Estimate::default();
    let mut left = a;
    for x in inner {
        total += gk15(f, left, x);
        left = x;
    }
    total += gk15(f, left, b);
    total
}

/// Composite GK15 with `n` equal panels.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Estimate {
    let n = n.max(1);
    let w = (b - a) / n as f64;
    let mut total = Estimate::default();
    for i in 0..n {
        let lo = a + w * i as f64;
        let hi = if i + 1 == n { b } else { lo + w };
        total += gk15(&f, lo, hi);
    }
    total
}

/// `ln ∫_a^b exp(g(t)) dt` on one GK15 panel, stable for large `g`.
pub fn ln_gk15_exp<F: Fn(f64) -> f64>(g: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return f64::NEG_INFINITY;
    }
    let nodes = kronrod_nodes(a, b);
    let vals: Vec<f64> = nodes.iter().map(|&(x, _)| g(x)).collect();
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = nodes
        .iter()
        .zip(&vals)
        .map(|(&(_, w), &v)| w * (v - m).exp())
        .sum();
    m + s.ln()
}

/// `ln ∫_a^b exp(g(t)) dt`, split at `breaks` and refined adaptively.
///
/// A panel is accepted once halving it changes its log-value by less than
/// `1e-13` relative to `reference`, a log-scale estimate of the total the
/// caller accumulates (pass `-inf` when there is none). Panels that are
/// negligible against the reference are therefore not refined, which keeps
/// sharply peaked integrands like `e^{t²/2}` cheap.
pub fn ln_integrate_exp<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, breaks: &[f64], reference: f64) -> f64 {
    if !(b > a) {
        return f64::NEG_INFINITY;
    }
    let mut total = f64::NEG_INFINITY;
    let mut left = a;
    let mut edges: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    edges.sort_by(|p, q| p.partial_cmp(q).unwrap());
    edges.dedup();
    edges.push(b);
    for right in edges {
        let whole = ln_gk15_exp(g, left, right);
        let r = reference.max(total).max(whole);
        total = ln_add_exp(total, ln_adaptive(g, left, right, whole, r, 0));
        if total == f64::INFINITY {
            return total;
        }
        left = right;
    }
    total
}

fn ln_adaptive<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, whole: f64, reference: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let l = ln_gk15_exp(g, a, m);
    let r = ln_gk15_exp(g, m, b);
    let halves = ln_add_exp(l, r);
    if halves == f64::INFINITY || (halves == f64::NEG_INFINITY && whole == f64::NEG_INFINITY) {
        return halves;
    }
    let reference = reference.max(halves);
    let err = (halves - whole).abs();
    let weight = (halves.max(whole) - reference).exp().min(1.0);
    if depth >= 48 || m <= a || m >= b || (err.is_finite() && err * weight < 1e-13) {
        return halves;
    }
    ln_add_exp(
        ln_adaptive(g, a, m, l, reference, depth + 1),
        ln_adaptive(g, m, b, r, reference, depth + 1),
    )
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    if m == f64::INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    xs.iter().fold(f64::NEG_INFINITY, |acc, &x| ln_add_exp(acc, x))
}

/// Rule deciding when a dyadic refinement trace signals an infinite integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRule {
    /// Cumulative growth factor per level that counts as a divergent step.
    pub growth_factor: f64,
    /// Number of consecutive divergent steps before `+∞` is declared.
    pub patience: usize,
    /// Levels before this index never count as non-decaying steps.
    pub min_level: usize,
}

impl Default for DivergenceRule {
    fn default() -> Self {
        Self {
            growth_factor: 1.5,
            patience: 5,
            min_level: 4,
        }
    }
}

/// Result of a dyadic tail integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub diverged: bool,
    /// Cumulative value after each refinement level.
    pub trace: Vec<f64>,
    pub panels: usize,
}

impl TailIntegral {
    pub fn infinite(trace: Vec<f64>, panels: usize) -> Self {
        Self {
            value: f64::INFINITY,
            error_estimate: f64::INFINITY,
            diverged: true,
            trace,
            panels,
        }
    }
}

/// Per-level contributions of `f` over `(0, top]`: level `j` covers
/// `[top·2^{-j-1}, top·2^{-j}]`. Panels are split at `breaks`.
pub fn dyadic_levels<F: Fn(f64) -> f64>(
    f: &F,
    top: f64,
    breaks: &[f64],
    depth: usize,
) -> (Vec<Estimate>, usize) {
    let mut out = Vec::with_capacity(depth);
    let mut panels = 0;
    let mut hi = top;
    for _ in 0..depth {
        let lo = 0.5 * hi;
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
        inner.sort_by(|p, q| p.partial_cmp(q).unwrap());
        inner.dedup();
        panels += inner.len() + 1;
        out.push(gk15_split(f, lo, hi, breaks));
        hi = lo;
    }
    (out, panels)
}

/// Sums per-level contributions, applies the divergence rule and adds a
/// geometric extrapolation of the truncated remainder.
pub fn summarize_levels(levels: &[Estimate], panels: usize, rule: &DivergenceRule) -> TailIntegral {
    let mut trace = Vec::with_capacity(levels.len());
    let mut cum = 0.0;
    let mut err = 0.0;
    let mut growth_run = 0;
    let mut flat_run = 0;
    for (j, lv) in levels.iter().enumerate() {
        if !lv.value.is_finite() {
            trace.push(f64::INFINITY);
            return TailIntegral::infinite(trace, panels);
        }
        let prev_cum = cum;
        cum += lv.value;
        err += lv.error;
        trace.push(cum);
        if j == 0 {
            continue;
        }
        let prev = levels[j - 1].value;
        let growing = prev_cum.abs() > 0.0
            && cum.abs() > rule.growth_factor * prev_cum.abs()
            && lv.value.abs() >= prev.abs();
        growth_run = if growing { growth_run + 1 } else { 0 };
        let non_decaying =
            j >= rule.min_level && lv.value.abs() > 0.0 && lv.value.abs() >= prev.abs() * (1.0 - 1e-9);
        flat_run = if non_decaying { flat_run + 1 } else { 0 };
        if growth_run >= rule.patience || flat_run >= rule.patience {
            return TailIntegral::infinite(trace, panels);
        }
    }
    let n = levels.len();
    let mut remainder = 0.0;
    if n >= 2 {
        let last = levels[n - 1].value;
        let before = levels[n - 2].value;
        if before != 0.0 && last.signum() == before.signum() {
            let r = last / before;
            if r < 1.0 {
                remainder = last * r / (1.0 - r);
            }
        }
    }
    TailIntegral {
        value: cum + remainder,
        error_estimate: err + remainder.abs(),
        diverged: false,
        trace,
        panels,
    }
}

/// Combines two dyadic level sequences of equal depth (the two tails of a
/// quantile integral) and summarizes the result.
pub fn summarize_two_sided(
    lower: &[Estimate],
    upper: &[Estimate],
    panels: usize,
    rule: &DivergenceRule,
) -> TailIntegral {
    let levels: Vec<Estimate> = lower
        .iter()
        .zip(upper)
        .map(|(a, b)| Estimate {
            value: a.value + b.value,
            error: a.error + b.error,
        })
        .collect();
    summarize_levels(&levels, panels, rule)
}

/// Whether a trace of running suprema, one entry per window-doubling level,
/// grows without bound: `patience` consecutive levels each multiplying the
/// value by more than `growth_factor`, or any infinite entry.
pub fn sup_trace_diverges(trace: &[f64], rule: &DivergenceRule) -> bool {
    if trace.iter().any(|v| *v == f64::INFINITY) {
        return true;
    }
    let mut run = 0;
    for w in trace.windows(2) {
        if w[0] > 0.0 && w[1] > rule.growth_factor * w[0] {
            run += 1;
            if run >= rule.patience {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

/// Bisection for the boundary of a monotone predicate on `[lo, hi]`, where
/// `pred(lo)` is true and `pred(hi)` is false. Runs to full floating-point
/// resolution and returns the last point where `pred` held.
pub fn bisect_boundary<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Finds `[lo, hi]` around `start` with `pred(lo)` true and `pred(hi)` false
/// by doubling outward; `None` when the predicate never flips.
pub fn bracket_boundary<P: Fn(f64) -> bool>(pred: &P, start: f64) -> Option<(f64, f64)> {
    let mut step = 1.0f64;
    if pred(start) {
        let mut lo = start;
        loop {
            let hi = start + step;
            if !hi.is_finite() || step > 1e300 {
                return None;
            }
            if !pred(hi) {
                return Some((lo, hi));
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        let mut hi = start;
        loop {
            let lo = start - step;
            if !lo.is_finite() || step > 1e300 {
                return None;
            }
            if pred(lo) {
                return Some((lo, hi));
            }
            hi = lo;
            step *= 2.0;
        }
    }
}
